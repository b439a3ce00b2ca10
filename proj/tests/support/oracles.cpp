#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace korpus::test::oracle {

namespace {

bool is_space_cp(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f';
}

bool is_digit_cp(char32_t c) { return c >= U'0' && c <= U'9'; }

bool is_alpha_cp(char32_t c) {
    if ((c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z')) return true;
    if (c == 0x00D7 || c == 0x00F7) return false;
    if (c >= 0x00C0 && c <= 0x00FF) return true;
    if (c >= 0x0100 && c <= 0x024F) return true;
    return false;
}

bool is_upper_cp(char32_t c) {
    if (c >= U'A' && c <= U'Z') return true;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return true;
    return false;
}

char32_t lower_cp(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 32;
    return c;
}

std::string encode_cp(char32_t c) {
    std::string out;
    if (c < 0x80) {
        out.push_back(static_cast<char>(c));
    } else if (c < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (c >> 6)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else if (c < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (c >> 12)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (c >> 18)));
        out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
    }
    return out;
}

std::string encode_range(const std::vector<char32_t>& cps, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) out += encode_cp(cps[i]);
    return out;
}

// Word spans as [start, end) code point indices.
std::vector<std::pair<std::size_t, std::size_t>> word_spans(const std::vector<char32_t>& cps) {
    std::vector<std::pair<std::size_t, std::size_t>> spans;
    std::size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && is_space_cp(cps[i])) ++i;
        if (i >= cps.size()) break;
        const std::size_t start = i;
        while (i < cps.size() && !is_space_cp(cps[i])) ++i;
        spans.emplace_back(start, i);
    }
    return spans;
}

// Splits on runs of at least `min_newlines` consecutive '\n', dropping empty
// segments.
std::vector<std::string> split_on_newline_runs(const std::string& text, std::size_t min_newlines) {
    std::vector<std::string> out;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        if (text[i] == '\n') {
            std::size_t run = 0;
            while (i < text.size() && text[i] == '\n') {
                ++run;
                ++i;
            }
            if (run >= min_newlines) {
                if (!current.empty()) out.push_back(current);
                current.clear();
            } else {
                for (std::size_t k = 0; k < run; ++k) current.push_back('\n');
            }
        } else {
            current.push_back(text[i]);
            ++i;
        }
    }
    if (!current.empty()) out.push_back(current);
    return out;
}

std::size_t count_duplicates(const std::vector<std::string>& elems) {
    std::size_t dups = 0;
    std::set<std::string> seen;
    for (const auto& e : elems) {
        if (seen.count(e)) {
            ++dups;
        } else {
            seen.insert(e);
        }
    }
    return dups;
}

std::size_t count_occurrences(const std::string& haystack, const std::string& needle) {
    if (needle.empty()) return 0;
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = haystack.find(needle, pos)) != std::string::npos) {
        ++count;
        pos += needle.size();
    }
    return count;
}

std::string trim_trailing_ws(const std::string& s) {
    std::size_t e = s.size();
    while (e > 0 && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r' || s[e - 1] == '\f' ||
                     s[e - 1] == '\v')) {
        --e;
    }
    return s.substr(0, e);
}

std::string lowercase_utf8(const std::string& s) {
    const auto cps = decode(s);
    std::string out;
    for (char32_t c : cps) out += encode_cp(lower_cp(c));
    return out;
}

// All occurrences (start word index) of every word n-gram.
std::map<std::vector<std::string>, std::vector<std::size_t>> ngram_occurrences(
    const std::vector<std::string>& ws, int n) {
    std::map<std::vector<std::string>, std::vector<std::size_t>> occ;
    if (n <= 0 || ws.size() < static_cast<std::size_t>(n)) return occ;
    for (std::size_t i = 0; i + n <= ws.size(); ++i) {
        std::vector<std::string> key(ws.begin() + i, ws.begin() + i + n);
        occ[key].push_back(i);
    }
    return occ;
}

std::size_t covered_chars(const std::vector<std::pair<std::size_t, std::size_t>>& spans,
                          const std::vector<std::size_t>& starts, int n, std::size_t total,
                          std::vector<char>& cover) {
    for (std::size_t s : starts) {
        const std::size_t from = spans[s].first;
        const std::size_t to = spans[s + n - 1].second;
        for (std::size_t i = from; i < to; ++i) cover[i] = 1;
    }
    return static_cast<std::size_t>(std::count(cover.begin(), cover.begin() + total, 1));
}

}  // namespace

std::vector<char32_t> decode(const std::string& text) {
    std::vector<char32_t> out;
    std::size_t i = 0;
    const auto byte = [&](std::size_t k) { return static_cast<unsigned char>(text[k]); };
    while (i < text.size()) {
        const unsigned char b = byte(i);
        std::size_t len = 0;
        char32_t cp = 0;
        if (b < 0x80) {
            len = 1;
            cp = b;
        } else if ((b & 0xE0) == 0xC0) {
            len = 2;
            cp = b & 0x1F;
        } else if ((b & 0xF0) == 0xE0) {
            len = 3;
            cp = b & 0x0F;
        } else if ((b & 0xF8) == 0xF0) {
            len = 4;
            cp = b & 0x07;
        } else {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        if (i + len > text.size()) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
            if ((byte(i + k) & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (byte(i + k) & 0x3F);
        }
        if (!ok || (len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
            cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(0xFFFD);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

std::vector<std::string> words(const std::string& text) {
    const auto cps = decode(text);
    std::vector<std::string> out;
    for (const auto& [b, e] : word_spans(cps)) out.push_back(encode_range(cps, b, e));
    return out;
}

std::vector<std::string> lines(const std::string& text) { return split_on_newline_runs(text, 1); }

std::vector<std::string> paragraphs(const std::string& text) { return split_on_newline_runs(text, 2); }

std::size_t codepoints(const std::string& text) { return decode(text).size(); }

double dup_line_frac(const std::string& text) {
    const auto ls = lines(text);
    if (ls.empty()) return 0.0;
    return static_cast<double>(count_duplicates(ls)) / static_cast<double>(ls.size());
}

double dup_para_frac_lines(const std::string& text) {
    const auto ls = lines(text);
    if (ls.empty()) return 0.0;
    const auto ps = paragraphs(text);
    std::set<std::string> seen;
    std::size_t dup_lines = 0;
    for (const auto& p : ps) {
        if (seen.count(p)) {
            dup_lines += lines(p).size();
        } else {
            seen.insert(p);
        }
    }
    return static_cast<double>(dup_lines) / static_cast<double>(ls.size());
}

double dup_para_frac_paras(const std::string& text) {
    const auto ps = paragraphs(text);
    if (ps.empty()) return 0.0;
    return static_cast<double>(count_duplicates(ps)) / static_cast<double>(ps.size());
}

double repeated_char_line_frac(const std::string& text) {
    const std::size_t total = codepoints(text);
    if (total == 0) return 0.0;
    std::set<std::string> seen;
    std::size_t dup_chars = 0;
    for (const auto& l : lines(text)) {
        if (seen.count(l)) {
            dup_chars += codepoints(l);
        } else {
            seen.insert(l);
        }
    }
    return static_cast<double>(dup_chars) / static_cast<double>(total);
}

double top_ngram_char_frac(const std::string& text, int n) {
    const auto cps = decode(text);
    if (cps.empty()) return 0.0;
    const auto spans = word_spans(cps);
    std::vector<std::string> ws;
    for (const auto& [b, e] : spans) ws.push_back(encode_range(cps, b, e));
    const auto occ = ngram_occurrences(ws, n);
    if (occ.empty()) return 0.0;
    std::size_t max_count = 0;
    for (const auto& [key, starts] : occ) max_count = std::max(max_count, starts.size());
    std::size_t best = 0;
    for (const auto& [key, starts] : occ) {
        if (starts.size() != max_count) continue;
        std::vector<char> cover(cps.size(), 0);
        best = std::max(best, covered_chars(spans, starts, n, cps.size(), cover));
    }
    return static_cast<double>(best) / static_cast<double>(cps.size());
}

double dup_ngram_char_frac(const std::string& text, int n) {
    const auto cps = decode(text);
    if (cps.empty()) return 0.0;
    const auto spans = word_spans(cps);
    std::vector<std::string> ws;
    for (const auto& [b, e] : spans) ws.push_back(encode_range(cps, b, e));
    const auto occ = ngram_occurrences(ws, n);
    std::vector<char> cover(cps.size(), 0);
    for (const auto& [key, starts] : occ) {
        if (starts.size() < 2) continue;
        for (std::size_t s : starts) {
            for (std::size_t i = spans[s].first; i < spans[s + n - 1].second; ++i) cover[i] = 1;
        }
    }
    const auto covered = static_cast<std::size_t>(std::count(cover.begin(), cover.end(), 1));
    return static_cast<double>(covered) / static_cast<double>(cps.size());
}

std::size_t word_count(const std::string& text) { return words(text).size(); }

double mean_word_len(const std::string& text) {
    const auto ws = words(text);
    if (ws.empty()) return 0.0;
    std::size_t total = 0;
    for (const auto& w : ws) total += codepoints(w);
    return static_cast<double>(total) / static_cast<double>(ws.size());
}

double symbol_word_ratio(const std::string& text, const std::vector<std::string>& symbols) {
    const auto ws = words(text);
    if (ws.empty()) return 0.0;
    std::size_t count = 0;
    for (const auto& sym : symbols) count += count_occurrences(text, sym);
    return static_cast<double>(count) / static_cast<double>(ws.size());
}

double bullet_line_frac(const std::string& text) {
    const auto ls = lines(text);
    if (ls.empty()) return 0.0;
    std::size_t bullets = 0;
    for (const auto& l : ls) {
        const auto cps = decode(l);
        std::size_t i = 0;
        while (i < cps.size() && is_space_cp(cps[i])) ++i;
        if (i < cps.size() && (cps[i] == U'-' || cps[i] == U'*' || cps[i] == 0x2022)) ++bullets;
    }
    return static_cast<double>(bullets) / static_cast<double>(ls.size());
}

double ellipsis_line_frac(const std::string& text) {
    const auto ls = lines(text);
    if (ls.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& l : ls) {
        const std::string t = trim_trailing_ws(l);
        if (t.size() >= 3 && t.compare(t.size() - 3, 3, "...") == 0) {
            ++hits;
        } else if (t.size() >= 3 && t.compare(t.size() - 3, 3, "…") == 0) {
            ++hits;
        }
    }
    return static_cast<double>(hits) / static_cast<double>(ls.size());
}

double alpha_word_frac(const std::string& text) {
    const auto ws = words(text);
    if (ws.empty()) return 0.0;
    std::size_t alpha = 0;
    for (const auto& w : ws) {
        for (char32_t c : decode(w)) {
            if (is_alpha_cp(c)) {
                ++alpha;
                break;
            }
        }
    }
    return static_cast<double>(alpha) / static_cast<double>(ws.size());
}

std::size_t stopword_hits(const std::string& text, const std::set<std::string>& stopwords) {
    std::size_t hits = 0;
    for (const auto& w : words(text)) {
        if (stopwords.count(w)) ++hits;
    }
    return hits;
}

double number_frac(const std::string& text) {
    std::size_t digits = 0;
    std::size_t non_ws = 0;
    for (char32_t c : decode(text)) {
        if (is_space_cp(c)) continue;
        ++non_ws;
        if (is_digit_cp(c)) ++digits;
    }
    if (non_ws == 0) return 0.0;
    return static_cast<double>(digits) / static_cast<double>(non_ws);
}

double uppercase_line_frac(const std::string& text) {
    const auto ls = lines(text);
    if (ls.empty()) return 0.0;
    std::size_t upper_lines = 0;
    for (const auto& l : ls) {
        std::size_t alpha = 0;
        std::size_t upper = 0;
        for (char32_t c : decode(l)) {
            if (is_alpha_cp(c)) {
                ++alpha;
                if (is_upper_cp(c)) ++upper;
            }
        }
        if (alpha > 0 && 2 * upper > alpha) ++upper_lines;
    }
    return static_cast<double>(upper_lines) / static_cast<double>(ls.size());
}

double avg_words_per_line(const std::string& text) {
    const auto ls = lines(text);
    if (ls.empty()) return 0.0;
    return static_cast<double>(words(text).size()) / static_cast<double>(ls.size());
}

double boilerplate_para_frac(const std::string& text, const std::vector<std::string>& needles) {
    const auto ps = paragraphs(text);
    if (ps.empty()) return 0.0;
    std::vector<std::string> lowered;
    for (const auto& n : needles) lowered.push_back(lowercase_utf8(n));
    std::size_t hits = 0;
    for (const auto& p : ps) {
        const std::string lp = lowercase_utf8(p);
        for (const auto& n : lowered) {
            if (!n.empty() && lp.find(n) != std::string::npos) {
                ++hits;
                break;
            }
        }
    }
    return static_cast<double>(hits) / static_cast<double>(ps.size());
}

std::set<std::string> shingle_set(const std::string& text) {
    const auto raw = decode(text);
    std::vector<char32_t> collapsed;
    for (char32_t c : raw) {
        if (is_space_cp(c)) {
            if (!collapsed.empty() && collapsed.back() != U' ') collapsed.push_back(U' ');
        } else {
            collapsed.push_back(c);
        }
    }
    if (!collapsed.empty() && collapsed.back() == U' ') collapsed.pop_back();

    std::set<std::string> out;
    constexpr std::size_t kWindow = 23;
    if (collapsed.empty()) return out;
    if (collapsed.size() <= kWindow) {
        std::string s;
        for (char32_t c : collapsed) s += encode_cp(c);
        out.insert(s);
        return out;
    }
    for (std::size_t i = 0; i + kWindow <= collapsed.size(); ++i) {
        std::string s;
        for (std::size_t k = 0; k < kWindow; ++k) s += encode_cp(collapsed[i + k]);
        out.insert(s);
    }
    return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    for (const auto& s : a) {
        if (b.count(s)) ++inter;
    }
    const std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

std::map<std::string, std::string> bfs_components(
    const std::vector<std::pair<std::string, std::string>>& edges) {
    std::map<std::string, std::vector<std::string>> adj;
    for (const auto& [a, b] : edges) {
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    std::map<std::string, std::string> root;
    for (const auto& [start, ignored] : adj) {
        if (root.count(start)) continue;
        std::vector<std::string> members;
        std::deque<std::string> queue{start};
        std::set<std::string> visited{start};
        while (!queue.empty()) {
            const std::string node = queue.front();
            queue.pop_front();
            members.push_back(node);
            for (const auto& next : adj[node]) {
                if (visited.insert(next).second) queue.push_back(next);
            }
        }
        const std::string smallest = *std::min_element(members.begin(), members.end());
        for (const auto& m : members) root[m] = smallest;
    }
    return root;
}

double percentile_nearest_rank(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    const auto n = values.size();
    std::size_t rank = static_cast<std::size_t>(std::ceil(p * static_cast<double>(n)));
    if (rank < 1) rank = 1;
    if (rank > n) rank = n;
    return values[rank - 1];
}

std::map<std::string, LabelMetrics> confusion_metrics(
    const std::vector<std::pair<std::string, std::string>>& pred_truth) {
    std::map<std::string, std::size_t> tp;
    std::map<std::string, std::size_t> pred_count;
    std::map<std::string, std::size_t> truth_count;
    for (const auto& [pred, truth] : pred_truth) {
        ++pred_count[pred];
        ++truth_count[truth];
        if (pred == truth) ++tp[pred];
    }
    std::map<std::string, LabelMetrics> out;
    std::set<std::string> labels;
    for (const auto& [l, c] : pred_count) labels.insert(l);
    for (const auto& [l, c] : truth_count) labels.insert(l);
    for (const auto& l : labels) {
        LabelMetrics m;
        m.precision = pred_count[l] ? static_cast<double>(tp[l]) / static_cast<double>(pred_count[l]) : 0.0;
        m.recall = truth_count[l] ? static_cast<double>(tp[l]) / static_cast<double>(truth_count[l]) : 0.0;
        out[l] = m;
    }
    return out;
}

}  // namespace korpus::test::oracle
