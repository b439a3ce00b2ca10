#include "korpus/heuristic_filters.hpp"

#include <algorithm>
#include <unordered_map>

#include "korpus/utf8.hpp"

namespace korpus {

namespace {

using nlohmann::ordered_json;

struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;
    std::size_t size() const { return end - begin; }
};

// One decode pass shared by the three filters.
struct Analysis {
    std::u32string cps;
    std::vector<Span> words;
    std::vector<Span> lines;
    std::vector<Span> paras;  // may contain single newlines inside

    std::u32string_view view(const Span& s) const {
        return std::u32string_view(cps).substr(s.begin, s.size());
    }
};

Analysis analyze(const std::string& text) {
    Analysis a;
    a.cps = utf8::decode_lossy(text);
    const std::size_t n = a.cps.size();

    for (std::size_t i = 0; i < n;) {
        while (i < n && utf8::is_space(a.cps[i])) ++i;
        if (i >= n) break;
        const std::size_t start = i;
        while (i < n && !utf8::is_space(a.cps[i])) ++i;
        a.words.push_back({start, i});
    }

    for (std::size_t i = 0; i < n;) {
        while (i < n && a.cps[i] == U'\n') ++i;
        if (i >= n) break;
        const std::size_t start = i;
        while (i < n && a.cps[i] != U'\n') ++i;
        a.lines.push_back({start, i});
    }

    // Paragraph separators are runs of 2+ newlines.
    std::size_t i = 0;
    std::size_t start = 0;
    bool in_para = false;
    while (i < n) {
        if (a.cps[i] == U'\n' && i + 1 < n && a.cps[i + 1] == U'\n') {
            if (in_para && i > start) a.paras.push_back({start, i});
            in_para = false;
            while (i < n && a.cps[i] == U'\n') ++i;
            start = i;
        } else {
            if (!in_para) {
                start = i;
                in_para = true;
            }
            ++i;
        }
    }
    if (in_para && n > start) a.paras.push_back({start, n});
    return a;
}

std::size_t count_lines_within(const Analysis& a, const Span& para) {
    std::size_t count = 0;
    std::size_t i = para.begin;
    while (i < para.end) {
        while (i < para.end && a.cps[i] == U'\n') ++i;
        if (i >= para.end) break;
        ++count;
        while (i < para.end && a.cps[i] != U'\n') ++i;
    }
    return count;
}

double frac(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return 0.0;
    return static_cast<double>(num) / static_cast<double>(den);
}

// Duplicate mass of a span sequence: (#duplicate elements, #lines inside
// duplicates, #chars inside duplicates).
struct DupMass {
    std::uint64_t elements = 0;
    std::uint64_t lines = 0;
    std::uint64_t chars = 0;
};

DupMass duplicate_mass(const Analysis& a, const std::vector<Span>& spans, bool with_lines) {
    DupMass m;
    std::unordered_map<std::u32string_view, char> seen;
    seen.reserve(spans.size() * 2);
    for (const auto& s : spans) {
        const auto v = a.view(s);
        if (!seen.emplace(v, 1).second) {
            ++m.elements;
            m.chars += s.size();
            if (with_lines) m.lines += count_lines_within(a, s);
        }
    }
    return m;
}

// Occurrence starts per distinct word n-gram. Keys join the words with a
// single space; words cannot contain whitespace, so keys cannot alias.
std::unordered_map<std::u32string, std::vector<std::uint32_t>> ngram_table(const Analysis& a, int n) {
    std::unordered_map<std::u32string, std::vector<std::uint32_t>> table;
    if (a.words.size() < static_cast<std::size_t>(n)) return table;
    const std::size_t count = a.words.size() - n + 1;
    table.reserve(count * 2);
    for (std::size_t i = 0; i < count; ++i) {
        std::u32string key;
        for (int k = 0; k < n; ++k) {
            if (k) key.push_back(U' ');
            key.append(a.view(a.words[i + k]));
        }
        table[std::move(key)].push_back(static_cast<std::uint32_t>(i));
    }
    return table;
}

// Marks the span of each occurrence with `gen` and returns the number of
// newly marked chars. Stamping avoids re-clearing between n-gram types.
std::uint64_t stamp_coverage(const Analysis& a, const std::vector<std::uint32_t>& starts, int n,
                             std::vector<std::uint32_t>& stamps, std::uint32_t gen) {
    std::uint64_t marked = 0;
    for (std::uint32_t s : starts) {
        const std::size_t from = a.words[s].begin;
        const std::size_t to = a.words[s + n - 1].end;
        for (std::size_t i = from; i < to; ++i) {
            if (stamps[i] != gen) {
                stamps[i] = gen;
                ++marked;
            }
        }
    }
    return marked;
}

// Union coverage (in chars) of the most frequent n-gram; ties take the
// largest coverage.
std::uint64_t top_ngram_coverage(const Analysis& a, int n) {
    const auto table = ngram_table(a, n);
    if (table.empty()) return 0;
    std::size_t max_count = 0;
    for (const auto& [key, starts] : table) max_count = std::max(max_count, starts.size());
    if (max_count == 1) {
        // Every n-gram occurs once; the best coverage is the longest span.
        std::uint64_t best = 0;
        for (std::size_t i = 0; i + n <= a.words.size(); ++i) {
            best = std::max<std::uint64_t>(best, a.words[i + n - 1].end - a.words[i].begin);
        }
        return best;
    }
    std::uint64_t best = 0;
    std::vector<std::uint32_t> stamps(a.cps.size(), 0);
    std::uint32_t gen = 0;
    for (const auto& [key, starts] : table) {
        if (starts.size() != max_count) continue;
        best = std::max(best, stamp_coverage(a, starts, n, stamps, ++gen));
    }
    return best;
}

// Union coverage (in chars) of every n-gram occurring at least twice.
std::uint64_t dup_ngram_coverage(const Analysis& a, int n) {
    const auto table = ngram_table(a, n);
    std::vector<std::uint32_t> stamps;
    std::uint64_t covered = 0;
    for (const auto& [key, starts] : table) {
        if (starts.size() < 2) continue;
        if (stamps.empty()) stamps.resize(a.cps.size(), 0);
        covered += stamp_coverage(a, starts, n, stamps, 1);
    }
    return covered;
}

std::uint64_t count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    std::uint64_t count = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::u32string lowered(std::u32string_view v) {
    std::u32string out;
    out.reserve(v.size());
    for (char32_t c : v) out.push_back(utf8::to_lower(c));
    return out;
}

}  // namespace

FilterOutcome repetition_filter(const Document& doc, const FilterConfig& cfg) {
    const Analysis a = analyze(doc.text);
    const std::uint64_t total_chars = a.cps.size();
    const std::uint64_t total_lines = a.lines.size();
    const std::uint64_t total_paras = a.paras.size();

    const DupMass line_dups = duplicate_mass(a, a.lines, false);
    const DupMass para_dups = duplicate_mass(a, a.paras, true);

    FilterOutcome out;
    auto add = [&](const std::string& id, double measured, double threshold) {
        out.measured[id] = measured;
        if (out.keep && measured > threshold) {
            out.keep = false;
            out.reason = id;
        }
    };

    add("dup_line_frac", frac(line_dups.elements, total_lines), cfg.dup_line_frac);
    add("dup_para_frac_lines", frac(para_dups.lines, total_lines), cfg.dup_para_frac_lines);
    add("dup_para_frac_paras", frac(para_dups.elements, total_paras), cfg.dup_para_frac_paras);
    add("repeated_char_line_frac", frac(line_dups.chars, total_chars), cfg.repeated_char_line_frac);
    for (const auto& [n, threshold] : cfg.top_ngram_char_frac) {
        add("top_" + std::to_string(n) + "gram_char_frac", frac(top_ngram_coverage(a, n), total_chars),
            threshold);
    }
    for (const auto& [n, threshold] : cfg.dup_ngram_char_frac) {
        add("dup_" + std::to_string(n) + "gram_char_frac", frac(dup_ngram_coverage(a, n), total_chars),
            threshold);
    }
    return out;
}

FilterOutcome document_filter(const Document& doc, const FilterConfig& cfg) {
    const Analysis a = analyze(doc.text);
    const std::uint64_t n_words = a.words.size();

    std::uint64_t word_chars = 0;
    std::uint64_t alpha_words = 0;
    std::uint64_t stop_hits = 0;
    for (const auto& w : a.words) {
        word_chars += w.size();
        bool alpha = false;
        for (std::size_t i = w.begin; i < w.end && !alpha; ++i) alpha = utf8::is_alpha(a.cps[i]);
        if (alpha) ++alpha_words;
        if (!cfg.stopwords.empty() && cfg.stopwords.count(utf8::encode(a.view(w)))) ++stop_hits;
    }

    std::uint64_t symbol_count = 0;
    for (const auto& sym : cfg.symbols) symbol_count += count_occurrences(doc.text, sym);

    std::uint64_t bullet_lines = 0;
    std::uint64_t ellipsis_lines = 0;
    for (const auto& l : a.lines) {
        std::size_t i = l.begin;
        while (i < l.end && utf8::is_space(a.cps[i])) ++i;
        if (i < l.end && (a.cps[i] == U'-' || a.cps[i] == U'*' || a.cps[i] == 0x2022)) ++bullet_lines;

        std::size_t e = l.end;
        while (e > l.begin && utf8::is_space(a.cps[e - 1])) --e;
        const auto tail = std::u32string_view(a.cps).substr(l.begin, e - l.begin);
        if ((tail.size() >= 3 && tail.substr(tail.size() - 3) == U"...") ||
            (!tail.empty() && tail.back() == 0x2026)) {
            ++ellipsis_lines;
        }
    }

    FilterOutcome out;
    out.measured["min_words"] = static_cast<double>(n_words);
    out.measured["max_words"] = static_cast<double>(n_words);
    out.measured["mean_word_len"] = frac(word_chars, n_words);
    out.measured["symbol_word_ratio"] = frac(symbol_count, n_words);
    out.measured["bullet_line_frac"] = frac(bullet_lines, a.lines.size());
    out.measured["ellipsis_line_frac"] = frac(ellipsis_lines, a.lines.size());
    out.measured["alpha_word_frac"] = frac(alpha_words, n_words);
    out.measured["stopword_hits"] = static_cast<double>(stop_hits);

    auto reject = [&](const char* reason) {
        out.keep = false;
        out.reason = reason;
        return out;
    };
    if (n_words < cfg.min_words) return reject("min_words");
    if (n_words > cfg.max_words) return reject("max_words");
    if (out.measured["mean_word_len"] > cfg.max_mean_word_len) return reject("mean_word_len");
    if (out.measured["symbol_word_ratio"] > cfg.max_symbol_word_ratio) return reject("symbol_word_ratio");
    if (out.measured["bullet_line_frac"] > cfg.max_bullet_line_frac) return reject("bullet_line_frac");
    if (out.measured["ellipsis_line_frac"] > cfg.max_ellipsis_line_frac) return reject("ellipsis_line_frac");
    if (out.measured["alpha_word_frac"] < cfg.min_alpha_word_frac) return reject("alpha_word_frac");
    if (stop_hits < cfg.min_stopword_hits) return reject("stopword_hits");
    return out;
}

FilterOutcome line_filter(const Document& doc, const FilterConfig& cfg) {
    const Analysis a = analyze(doc.text);

    std::uint64_t digits = 0;
    std::uint64_t non_ws = 0;
    for (char32_t c : a.cps) {
        if (utf8::is_space(c)) continue;
        ++non_ws;
        if (utf8::is_digit(c)) ++digits;
    }

    std::uint64_t upper_lines = 0;
    for (const auto& l : a.lines) {
        std::uint64_t alpha = 0;
        std::uint64_t upper = 0;
        for (std::size_t i = l.begin; i < l.end; ++i) {
            if (!utf8::is_alpha(a.cps[i])) continue;
            ++alpha;
            if (utf8::is_upper(a.cps[i])) ++upper;
        }
        if (alpha > 0 && 2 * upper > alpha) ++upper_lines;
    }

    std::vector<std::u32string> needles;
    for (const auto& s : cfg.boilerplate_strings) needles.push_back(lowered(utf8::decode_lossy(s)));
    std::uint64_t boiler_paras = 0;
    for (const auto& p : a.paras) {
        const std::u32string lp = lowered(a.view(p));
        for (const auto& n : needles) {
            if (!n.empty() && lp.find(n) != std::u32string::npos) {
                ++boiler_paras;
                break;
            }
        }
    }

    FilterOutcome out;
    out.measured["number_frac"] = frac(digits, non_ws);
    out.measured["uppercase_line_frac"] = frac(upper_lines, a.lines.size());
    out.measured["avg_words_per_line"] = frac(a.words.size(), a.lines.size());
    out.measured["boilerplate_para_frac"] = frac(boiler_paras, a.paras.size());

    auto reject = [&](const char* reason) {
        out.keep = false;
        out.reason = reason;
        return out;
    };
    if (out.measured["number_frac"] > cfg.max_number_frac) return reject("number_frac");
    if (out.measured["uppercase_line_frac"] > cfg.max_uppercase_line_frac) return reject("uppercase_line_frac");
    if (out.measured["avg_words_per_line"] < cfg.min_avg_words_per_line) return reject("avg_words_per_line");
    if (out.measured["boilerplate_para_frac"] > cfg.max_boilerplate_para_frac) {
        return reject("boilerplate_para_frac");
    }
    return out;
}

nlohmann::ordered_json FilterConfig::to_json() const {
    ordered_json j = ordered_json::object();
    j["dup_line_frac"] = dup_line_frac;
    j["dup_para_frac_lines"] = dup_para_frac_lines;
    j["dup_para_frac_paras"] = dup_para_frac_paras;
    j["repeated_char_line_frac"] = repeated_char_line_frac;
    ordered_json top = ordered_json::object();
    for (const auto& [n, v] : top_ngram_char_frac) top[std::to_string(n)] = v;
    j["top_ngram_char_frac"] = top;
    ordered_json dup = ordered_json::object();
    for (const auto& [n, v] : dup_ngram_char_frac) dup[std::to_string(n)] = v;
    j["dup_ngram_char_frac"] = dup;
    j["min_words"] = min_words;
    j["max_words"] = max_words;
    j["max_mean_word_len"] = max_mean_word_len;
    j["max_symbol_word_ratio"] = max_symbol_word_ratio;
    j["symbols"] = symbols;
    j["max_bullet_line_frac"] = max_bullet_line_frac;
    j["max_ellipsis_line_frac"] = max_ellipsis_line_frac;
    j["min_alpha_word_frac"] = min_alpha_word_frac;
    j["stopwords"] = stopwords;
    j["min_stopword_hits"] = min_stopword_hits;
    j["max_number_frac"] = max_number_frac;
    j["max_uppercase_line_frac"] = max_uppercase_line_frac;
    j["min_avg_words_per_line"] = min_avg_words_per_line;
    j["max_boilerplate_para_frac"] = max_boilerplate_para_frac;
    j["boilerplate_strings"] = boilerplate_strings;
    return j;
}

FilterConfig FilterConfig::from_json(const ordered_json& j) {
    FilterConfig cfg;
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
    };
    get("dup_line_frac", cfg.dup_line_frac);
    get("dup_para_frac_lines", cfg.dup_para_frac_lines);
    get("dup_para_frac_paras", cfg.dup_para_frac_paras);
    get("repeated_char_line_frac", cfg.repeated_char_line_frac);
    if (j.contains("top_ngram_char_frac")) {
        cfg.top_ngram_char_frac.clear();
        for (const auto& [k, v] : j.at("top_ngram_char_frac").items()) {
            cfg.top_ngram_char_frac[std::stoi(k)] = v.get<double>();
        }
    }
    if (j.contains("dup_ngram_char_frac")) {
        cfg.dup_ngram_char_frac.clear();
        for (const auto& [k, v] : j.at("dup_ngram_char_frac").items()) {
            cfg.dup_ngram_char_frac[std::stoi(k)] = v.get<double>();
        }
    }
    get("min_words", cfg.min_words);
    get("max_words", cfg.max_words);
    get("max_mean_word_len", cfg.max_mean_word_len);
    get("max_symbol_word_ratio", cfg.max_symbol_word_ratio);
    get("symbols", cfg.symbols);
    get("max_bullet_line_frac", cfg.max_bullet_line_frac);
    get("max_ellipsis_line_frac", cfg.max_ellipsis_line_frac);
    get("min_alpha_word_frac", cfg.min_alpha_word_frac);
    get("stopwords", cfg.stopwords);
    get("min_stopword_hits", cfg.min_stopword_hits);
    get("max_number_frac", cfg.max_number_frac);
    get("max_uppercase_line_frac", cfg.max_uppercase_line_frac);
    get("min_avg_words_per_line", cfg.min_avg_words_per_line);
    get("max_boilerplate_para_frac", cfg.max_boilerplate_para_frac);
    get("boilerplate_strings", cfg.boilerplate_strings);
    return cfg;
}

std::vector<std::string> FilterConfig::validate() const {
    std::vector<std::string> problems;
    auto check_frac = [&](const char* name, double v) {
        if (!(v >= 0.0 && v <= 1.0)) {
            problems.push_back(std::string(name) + " must lie in [0,1], got " + std::to_string(v));
        }
    };
    check_frac("dup_line_frac", dup_line_frac);
    check_frac("dup_para_frac_lines", dup_para_frac_lines);
    check_frac("dup_para_frac_paras", dup_para_frac_paras);
    check_frac("repeated_char_line_frac", repeated_char_line_frac);
    for (const auto& [n, v] : top_ngram_char_frac) {
        check_frac(("top_ngram_char_frac[" + std::to_string(n) + "]").c_str(), v);
        if (n < 1) problems.push_back("top_ngram_char_frac has non-positive n");
    }
    for (const auto& [n, v] : dup_ngram_char_frac) {
        check_frac(("dup_ngram_char_frac[" + std::to_string(n) + "]").c_str(), v);
        if (n < 1) problems.push_back("dup_ngram_char_frac has non-positive n");
    }
    if (min_words >= max_words) problems.push_back("min_words must be smaller than max_words");
    if (max_mean_word_len <= 0) problems.push_back("max_mean_word_len must be positive");
    if (max_symbol_word_ratio < 0) problems.push_back("max_symbol_word_ratio must be non-negative");
    check_frac("max_bullet_line_frac", max_bullet_line_frac);
    check_frac("max_ellipsis_line_frac", max_ellipsis_line_frac);
    check_frac("min_alpha_word_frac", min_alpha_word_frac);
    check_frac("max_number_frac", max_number_frac);
    check_frac("max_uppercase_line_frac", max_uppercase_line_frac);
    if (min_avg_words_per_line < 0) problems.push_back("min_avg_words_per_line must be non-negative");
    check_frac("max_boilerplate_para_frac", max_boilerplate_para_frac);
    return problems;
}

}  // namespace korpus
