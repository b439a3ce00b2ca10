#pragma once

#include <string>
#include <string_view>

namespace korpus {

// Extracts readable text from an HTML page. Not a browser: a single forward
// pass that drops markup, skips non-content subtrees (script, style, head,
// nav and friends), breaks block elements into newlines and decodes character
// references. Output lines are trimmed, inline whitespace is collapsed, and
// consecutive block breaks collapse to a single newline.
std::string html_to_text(std::string_view html);

// Decodes &amp;-style named references (the common subset), &#NNN; and
// &#xHH;. Unknown references pass through verbatim.
std::string decode_html_entities(std::string_view text);

}  // namespace korpus
