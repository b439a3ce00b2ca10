#include "korpus/html_text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <unordered_map>
#include <vector>

#include "korpus/utf8.hpp"

namespace korpus {

namespace {

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

// Subtrees whose text is never page content.
bool is_skipped_container(const std::string& tag) {
    static const std::array<const char*, 10> kSkip = {"script", "style",  "noscript", "template", "head",
                                                      "nav",    "iframe", "svg",      "object",   "aside"};
    return std::find(kSkip.begin(), kSkip.end(), tag) != kSkip.end();
}

bool is_block_tag(const std::string& tag) {
    static const std::array<const char*, 30> kBlock = {
        "p",      "div",        "br",  "li", "ul",     "ol",         "table", "tr",      "td",      "th",
        "h1",     "h2",         "h3",  "h4", "h5",     "h6",         "form",  "section", "article", "header",
        "footer", "blockquote", "pre", "hr", "figure", "figcaption", "main",  "dl",      "dt",      "dd"};
    return std::find(kBlock.begin(), kBlock.end(), tag) != kBlock.end();
}

const std::unordered_map<std::string, std::string>& named_entities() {
    static const std::unordered_map<std::string, std::string> kEntities = {
        {"amp", "&"},    {"lt", "<"},      {"gt", ">"},      {"quot", "\""},   {"apos", "'"},
        {"nbsp", " "}, {"auml", "ä"},  {"ouml", "ö"},    {"uuml", "ü"},    {"Auml", "Ä"},
        {"Ouml", "Ö"},   {"Uuml", "Ü"},    {"szlig", "ß"},   {"euro", "€"},    {"copy", "©"},
        {"reg", "®"},    {"trade", "™"},   {"hellip", "…"},  {"mdash", "—"},   {"ndash", "–"},
        {"ldquo", "“"}, {"rdquo", "”"}, {"lsquo", "‘"}, {"rsquo", "’"},
        {"bdquo", "„"}, {"laquo", "«"}, {"raquo", "»"}, {"sect", "§"},    {"deg", "°"},
        {"middot", "·"}, {"bull", "•"},    {"times", "×"},   {"eacute", "é"},  {"egrave", "è"},
        {"agrave", "à"}, {"ccedil", "ç"},
    };
    return kEntities;
}

}  // namespace

std::string decode_html_entities(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] != '&') {
            out.push_back(text[i++]);
            continue;
        }
        const auto semi = text.find(';', i + 1);
        if (semi == std::string_view::npos || semi - i > 12) {
            out.push_back(text[i++]);
            continue;
        }
        const std::string_view body = text.substr(i + 1, semi - i - 1);
        if (!body.empty() && body[0] == '#') {
            char32_t cp = 0;
            bool ok = body.size() > 1;
            if (body.size() > 2 && (body[1] == 'x' || body[1] == 'X')) {
                for (std::size_t k = 2; ok && k < body.size(); ++k) {
                    const char c = body[k];
                    if (!std::isxdigit(static_cast<unsigned char>(c))) {
                        ok = false;
                    } else {
                        cp = cp * 16 + static_cast<char32_t>(std::isdigit(static_cast<unsigned char>(c))
                                                                 ? c - '0'
                                                                 : std::tolower(c) - 'a' + 10);
                    }
                }
            } else {
                for (std::size_t k = 1; ok && k < body.size(); ++k) {
                    if (!std::isdigit(static_cast<unsigned char>(body[k]))) {
                        ok = false;
                    } else {
                        cp = cp * 10 + static_cast<char32_t>(body[k] - '0');
                    }
                }
            }
            if (ok && cp > 0 && cp <= 0x10FFFF && !(cp >= 0xD800 && cp <= 0xDFFF)) {
                out += utf8::encode(std::u32string(1, cp));
                i = semi + 1;
                continue;
            }
        } else {
            const auto& table = named_entities();
            const auto it = table.find(std::string(body));
            if (it != table.end()) {
                out += it->second;
                i = semi + 1;
                continue;
            }
        }
        out.push_back(text[i++]);
    }
    return out;
}

std::string html_to_text(std::string_view html) {
    std::string raw;
    raw.reserve(html.size() / 2);

    std::size_t i = 0;
    std::vector<std::string> skip_stack;
    while (i < html.size()) {
        const char c = html[i];
        if (c != '<') {
            if (skip_stack.empty()) raw.push_back(c);
            ++i;
            continue;
        }
        // Comments and CDATA.
        if (html.compare(i, 4, "<!--") == 0) {
            const auto end = html.find("-->", i + 4);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        if (html.compare(i, 9, "<![CDATA[") == 0) {
            const auto end = html.find("]]>", i + 9);
            i = end == std::string_view::npos ? html.size() : end + 3;
            continue;
        }
        const auto close = html.find('>', i + 1);
        if (close == std::string_view::npos) break;
        std::string_view inside = html.substr(i + 1, close - i - 1);
        i = close + 1;
        if (inside.empty()) continue;

        bool closing = false;
        if (inside[0] == '/') {
            closing = true;
            inside.remove_prefix(1);
        }
        std::size_t name_end = 0;
        while (name_end < inside.size() && (std::isalnum(static_cast<unsigned char>(inside[name_end])) ||
                                            inside[name_end] == '-' || inside[name_end] == ':')) {
            ++name_end;
        }
        if (name_end == 0) continue;  // <!DOCTYPE ...>, <?xml ...>, stray <
        const std::string tag = ascii_lower(inside.substr(0, name_end));
        const bool self_closing = !inside.empty() && inside.back() == '/';

        if (is_skipped_container(tag)) {
            if (closing) {
                if (!skip_stack.empty() && skip_stack.back() == tag) skip_stack.pop_back();
            } else if (!self_closing) {
                // script and style swallow everything to their end tag, even
                // stray '<' inside.
                if (tag == "script" || tag == "style") {
                    const std::string terminator = "</" + tag;
                    std::size_t scan = i;
                    while (scan < html.size()) {
                        const auto hit = html.find('<', scan);
                        if (hit == std::string_view::npos) {
                            scan = html.size();
                            break;
                        }
                        const std::string window = ascii_lower(html.substr(hit, terminator.size()));
                        if (window == terminator) {
                            const auto tag_close = html.find('>', hit);
                            scan = tag_close == std::string_view::npos ? html.size() : tag_close + 1;
                            break;
                        }
                        scan = hit + 1;
                    }
                    i = scan;
                } else {
                    skip_stack.push_back(tag);
                }
            }
            continue;
        }
        if (!skip_stack.empty()) continue;
        if (is_block_tag(tag)) raw.push_back('\n');
    }

    raw = decode_html_entities(raw);

    // Normalize: trim each line, collapse internal whitespace runs, and join
    // non-empty lines with single newlines (runs of block breaks collapse).
    std::string out;
    out.reserve(raw.size());
    bool wrote_any = false;
    auto flush_line = [&](std::string_view l) {
        std::size_t b = 0;
        std::size_t e = l.size();
        auto is_ws = [](char ch) {
            return ch == ' ' || ch == '\t' || ch == '\r' || ch == '\f' || ch == '\v';
        };
        while (b < e && is_ws(l[b])) ++b;
        while (e > b && is_ws(l[e - 1])) --e;
        if (b == e) return;
        if (wrote_any) out.push_back('\n');
        bool prev_ws = false;
        for (std::size_t k = b; k < e; ++k) {
            const char ch = l[k];
            if (is_ws(ch)) {
                prev_ws = true;
                continue;
            }
            if (prev_ws) out.push_back(' ');
            prev_ws = false;
            out.push_back(ch);
        }
        wrote_any = true;
    };
    std::size_t pos = 0;
    while (pos <= raw.size()) {
        const auto nl = raw.find('\n', pos);
        if (nl == std::string::npos) {
            flush_line(std::string_view(raw).substr(pos));
            break;
        }
        flush_line(std::string_view(raw).substr(pos, nl - pos));
        pos = nl + 1;
    }
    return out;
}

}  // namespace korpus
