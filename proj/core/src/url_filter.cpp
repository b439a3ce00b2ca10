#include "korpus/url_filter.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <stdexcept>

#include "korpus/utf8.hpp"

namespace korpus {

namespace {

// Trimmed public-suffix snapshot: common ICANN suffixes plus a few hosting
// platforms whose customers get their own registrable name. `*.` rules match
// exactly one extra label, `!` entries override a wildcard.
const char* const kSuffixSnapshot[] = {
    "com", "net", "org", "edu", "gov", "mil", "int", "info", "biz", "name",
    "mobi", "pro", "tel", "travel", "museum", "aero", "asia", "cat", "coop",
    "jobs", "arpa", "xyz", "online", "site", "club", "shop", "blog", "wiki",
    "news", "cloud", "space", "store", "fun", "top", "work", "art", "tech",
    "dev", "app", "page", "io", "co", "cc", "tv", "me", "ws", "to",
    "de", "at", "ch", "li", "eu", "fr", "it", "nl", "es", "pt", "gr", "ie",
    "be", "lu", "dk", "se", "no", "fi", "is", "ee", "lv", "lt", "cz", "sk",
    "hu", "ro", "bg", "hr", "si", "rs", "ba", "mk", "al", "md", "ua",
    "com.ua", "net.ua", "ru", "su", "by", "kz", "tr", "com.tr",
    "uk", "co.uk", "org.uk", "me.uk", "ltd.uk", "plc.uk", "net.uk", "sch.uk",
    "ac.uk", "gov.uk", "nhs.uk", "police.uk",
    "pl", "com.pl", "net.pl", "org.pl",
    "us", "ca", "mx", "com.mx", "ar", "com.ar", "cl", "br", "com.br",
    "net.br", "org.br",
    "au", "com.au", "net.au", "org.au", "edu.au", "gov.au", "asn.au", "id.au",
    "nz", "co.nz", "net.nz", "org.nz", "govt.nz",
    "jp", "co.jp", "ne.jp", "or.jp", "ac.jp", "go.jp",
    "cn", "com.cn", "net.cn", "org.cn", "edu.cn", "gov.cn",
    "hk", "com.hk", "tw", "com.tw", "kr", "co.kr", "sg", "com.sg",
    "in", "co.in", "net.in", "org.in",
    "ck", "*.ck", "!www.ck",
    "github.io", "gitlab.io", "blogspot.com", "wordpress.com", "netlify.app",
    "herokuapp.com", "web.app", "firebaseapp.com", "pages.dev",
};

struct SuffixTables {
    std::unordered_set<std::string> exact;
    std::unordered_set<std::string> wildcard;   // "*.ck" stored as "ck"
    std::unordered_set<std::string> exception;  // "!www.ck" stored as "www.ck"
};

const SuffixTables& suffix_tables() {
    static const SuffixTables tables = [] {
        SuffixTables t;
        for (const char* entry : kSuffixSnapshot) {
            std::string_view s = entry;
            if (s.starts_with("!")) {
                t.exception.emplace(s.substr(1));
            } else if (s.starts_with("*.")) {
                t.wildcard.emplace(s.substr(2));
            } else {
                t.exact.emplace(s);
            }
        }
        return t;
    }();
    return tables;
}

std::vector<std::string_view> split_labels(std::string_view host) {
    std::vector<std::string_view> labels;
    size_t start = 0;
    while (start <= host.size()) {
        const size_t dot = host.find('.', start);
        if (dot == std::string_view::npos) {
            labels.push_back(host.substr(start));
            break;
        }
        labels.push_back(host.substr(start, dot - start));
        start = dot + 1;
    }
    return labels;
}

std::string join_tail(const std::vector<std::string_view>& labels, size_t count) {
    std::string out;
    for (size_t i = labels.size() - count; i < labels.size(); ++i) {
        if (!out.empty()) out += '.';
        out += labels[i];
    }
    return out;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return out;
}

bool valid_host_char(unsigned char c) {
    if (c <= 0x20 || c == 0x7F) return false;
    switch (c) {
        case '/': case '\\': case '?': case '#': case '@': case '<': case '>':
        case '"': case '\'': case '`': case '^': case '{': case '}': case '|':
            return false;
        default:
            return true;
    }
}

std::string lower_codepoints(std::string_view s) {
    std::u32string cps = utf8::decode_lossy(s);
    for (char32_t& c : cps) c = utf8::to_lower(c);
    return utf8::encode(cps);
}

std::vector<std::string> read_list_file(const std::string& path) {
    if (path.empty()) return {};
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rule file: " + path);
    std::vector<std::string> entries;
    std::string line;
    while (std::getline(in, line)) {
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        size_t b = line.find_first_not_of(" \t\r");
        if (b == std::string::npos) continue;
        size_t e = line.find_last_not_of(" \t\r");
        entries.push_back(line.substr(b, e - b + 1));
    }
    return entries;
}

// Checks the registrable domain and every longer suffix chain of the host
// against the set, so "evil.example" also blocks "cdn.evil.example" and a
// deeper entry like "bad.host.example" matches exactly.
bool domain_matches(std::string_view host, const std::string& registrable,
                    const std::unordered_set<std::string>& domains) {
    if (registrable.empty()) return domains.count(std::string(host)) > 0;
    std::string_view rest = host;
    while (true) {
        if (domains.count(std::string(rest))) return true;
        if (rest == registrable) return false;
        const size_t dot = rest.find('.');
        if (dot == std::string_view::npos) return false;
        rest.remove_prefix(dot + 1);
    }
}

}  // namespace

std::string percent_decode(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '%' && i + 2 < s.size() && std::isxdigit(static_cast<unsigned char>(s[i + 1])) &&
            std::isxdigit(static_cast<unsigned char>(s[i + 2]))) {
            auto hex = [](char c) -> int {
                if (c >= '0' && c <= '9') return c - '0';
                if (c >= 'a' && c <= 'f') return c - 'a' + 10;
                return c - 'A' + 10;
            };
            out += static_cast<char>(hex(s[i + 1]) * 16 + hex(s[i + 2]));
            i += 2;
        } else {
            out += s[i];
        }
    }
    return out;
}

std::optional<std::string> url_host(std::string_view url) {
    std::string_view rest = url;
    const size_t scheme_end = rest.find("://");
    if (scheme_end != std::string_view::npos) {
        bool scheme_ok = scheme_end > 0;
        for (size_t i = 0; i < scheme_end; ++i) {
            const char c = rest[i];
            const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
                            (c >= '0' && c <= '9') || c == '+' || c == '-' || c == '.';
            if (!ok) {
                scheme_ok = false;
                break;
            }
        }
        if (!scheme_ok) return std::nullopt;
        rest.remove_prefix(scheme_end + 3);
    }
    const size_t authority_end = rest.find_first_of("/?#");
    std::string_view authority = rest.substr(0, authority_end);
    const size_t at = authority.rfind('@');
    if (at != std::string_view::npos) authority.remove_prefix(at + 1);
    // Port: a trailing :digits. IPv6 literals are bracketed, so this is safe.
    if (!authority.empty() && authority.front() == '[') {
        const size_t close = authority.find(']');
        if (close == std::string_view::npos) return std::nullopt;
        authority = authority.substr(1, close - 1);
    } else {
        const size_t colon = authority.rfind(':');
        if (colon != std::string_view::npos) {
            bool digits = colon + 1 < authority.size();
            for (size_t i = colon + 1; i < authority.size(); ++i) {
                if (!std::isdigit(static_cast<unsigned char>(authority[i]))) digits = false;
            }
            if (!digits) return std::nullopt;
            authority = authority.substr(0, colon);
        }
    }
    while (!authority.empty() && authority.back() == '.') authority.remove_suffix(1);
    if (authority.empty()) return std::nullopt;
    for (const char c : authority) {
        if (!valid_host_char(static_cast<unsigned char>(c))) return std::nullopt;
    }
    std::string host = ascii_lower(authority);
    if (host.find("..") != std::string::npos || host.front() == '.') return std::nullopt;
    return host;
}

std::string registrable_domain(std::string_view host) {
    const auto labels = split_labels(host);
    if (labels.empty() || labels.front().empty()) return {};

    const bool numeric = std::all_of(host.begin(), host.end(), [](char c) {
        return (c >= '0' && c <= '9') || c == '.';
    });
    if (numeric) return std::string(host);

    const SuffixTables& tables = suffix_tables();
    size_t suffix_labels = 1;  // default rule: the TLD alone
    for (size_t k = 1; k <= labels.size(); ++k) {
        const std::string tail = join_tail(labels, k);
        if (tables.exception.count(tail)) return tail;
        if (tables.exact.count(tail)) suffix_labels = std::max(suffix_labels, k);
        if (k >= 2 && tables.wildcard.count(join_tail(labels, k - 1))) {
            suffix_labels = std::max(suffix_labels, k);
        }
    }
    if (labels.size() <= suffix_labels) return {};
    return join_tail(labels, suffix_labels + 1);
}

UrlRules load_url_rules(const std::string& blocked_domains_path,
                        const std::string& blocked_words_path,
                        const std::string& hq_domains_path,
                        double word_threshold) {
    UrlRules rules;
    rules.word_threshold = word_threshold;
    for (const auto& entry : read_list_file(blocked_domains_path)) {
        rules.blocked_domains.insert(ascii_lower(entry));
    }
    for (const auto& entry : read_list_file(blocked_words_path)) {
        const size_t colon = entry.rfind(':');
        if (colon == std::string::npos || colon == 0 || colon + 1 == entry.size()) {
            throw std::runtime_error("bad word rule (expected word:weight): " + entry);
        }
        double weight = 0.0;
        try {
            size_t used = 0;
            weight = std::stod(entry.substr(colon + 1), &used);
            if (used != entry.size() - colon - 1) throw std::invalid_argument("trailing");
        } catch (const std::exception&) {
            throw std::runtime_error("bad weight in word rule: " + entry);
        }
        rules.blocked_url_words.emplace_back(lower_codepoints(entry.substr(0, colon)), weight);
    }
    for (const auto& entry : read_list_file(hq_domains_path)) {
        rules.excluded_hq_domains.insert(ascii_lower(entry));
    }
    return rules;
}

FilterOutcome filter_url(Document& doc, const UrlRules& rules) {
    if (!doc.url.has_value() || doc.url->empty()) {
        doc.annotations["url_filter"] = "no-url";
        return FilterOutcome::kept();
    }
    const auto host = url_host(*doc.url);
    if (!host.has_value()) return FilterOutcome::rejected("bad-url");

    const std::string registrable = registrable_domain(*host);
    if (domain_matches(*host, registrable, rules.blocked_domains)) {
        return FilterOutcome::rejected("blocked-domain");
    }

    FilterOutcome out = FilterOutcome::kept();
    if (!rules.blocked_url_words.empty()) {
        const std::string lowered = lower_codepoints(percent_decode(*doc.url));
        double score = 0.0;
        for (const auto& [word, weight] : rules.blocked_url_words) {
            if (!word.empty() && lowered.find(word) != std::string::npos) score += weight;
        }
        out.measured["word_score"] = score;
        if (score >= rules.word_threshold) {
            out.keep = false;
            out.reason = "blocked-word";
            return out;
        }
    }

    if (domain_matches(*host, registrable, rules.excluded_hq_domains)) {
        out.keep = false;
        out.reason = "hq-excluded";
        return out;
    }
    return out;
}

}  // namespace korpus
