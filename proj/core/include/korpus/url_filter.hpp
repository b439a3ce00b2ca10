#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

#include "korpus/document.hpp"

namespace korpus {

// Rule set for URL-based rejection. Immutable after load; filter_url is pure
// and safe to call from many threads.
struct UrlRules {
    std::unordered_set<std::string> blocked_domains;
    std::vector<std::pair<std::string, double>> blocked_url_words;
    double word_threshold = 1.0;
    std::unordered_set<std::string> excluded_hq_domains;
};

// Loads the three list files. Domain files: one domain per line. Word file:
// `word:weight` per line. `#` starts a comment in all three; blank lines are
// ignored. An empty path stands for an empty list; a missing or unreadable
// file throws std::runtime_error, as does a word line with an unparseable
// weight.
UrlRules load_url_rules(const std::string& blocked_domains_path,
                        const std::string& blocked_words_path,
                        const std::string& hq_domains_path,
                        double word_threshold = 1.0);

// Extracts the host from a URL, lower-cased, without userinfo, port or
// trailing dot. Scheme-less inputs are treated as starting with the host.
// Returns nullopt for inputs with no usable host (empty, whitespace or
// control characters inside the host, and similar).
std::optional<std::string> url_host(std::string_view url);

// Registrable domain under a bundled public-suffix snapshot: the public
// suffix plus one label. Wildcard (*.foo) and exception (!bar.foo) rules are
// honoured; unknown TLDs fall back to the default rule, so the last label is
// treated as the public suffix. Returns "" when the host itself is a public
// suffix. Purely numeric hosts (IPv4) are returned unchanged.
std::string registrable_domain(std::string_view host);

// Percent-decodes %XX escapes; malformed escapes are kept verbatim.
std::string percent_decode(std::string_view s);

// Applies the rules in order: blocked domain, weighted word score, curated
// high-quality exclusion. Domain checks cover the registrable domain and
// every sub-chain below it, so an entry blocks all of its subdomains and
// deeper-than-registrable entries still work. Word matching is
// case-insensitive over the percent-decoded full URL; each listed word
// counts once and a total >= threshold rejects. Reasons: `blocked-domain`,
// `blocked-word`, `hq-excluded`, `bad-url`. Documents without a URL are kept
// and annotated with url_filter="no-url".
FilterOutcome filter_url(Document& doc, const UrlRules& rules);

}  // namespace korpus
