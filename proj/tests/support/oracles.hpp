#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

// Brute-force reference implementations used to check the library. Everything
// here favours obviousness over speed: plain splits, nested loops, std::set,
// full sorts. Keep this file free of korpus/ includes so the references stay
// independent of the code under test.

namespace korpus::test::oracle {

// Naive UTF-8 decode; invalid bytes become U+FFFD one byte at a time.
std::vector<char32_t> decode(const std::string& text);

// Measurement contract shared with the library:
//   words      maximal runs of non-whitespace code points (ASCII whitespace)
//   lines      segments between runs of '\n', empty segments dropped
//   paragraphs segments between runs of two or more '\n', empty dropped
//   chars      code points, counted over the whole text
std::vector<std::string> words(const std::string& text);
std::vector<std::string> lines(const std::string& text);
std::vector<std::string> paragraphs(const std::string& text);
std::size_t codepoints(const std::string& text);

// Table 2 style repetition measurements. A duplicate element is one equal to
// any earlier element of the same sequence. All fractions are 0 when the
// denominator is 0.
double dup_line_frac(const std::string& text);
double dup_para_frac_lines(const std::string& text);
double dup_para_frac_paras(const std::string& text);
double repeated_char_line_frac(const std::string& text);

// Coverage of word n-grams measured in code points over the whole text.
// top: union of spans of the most frequent n-gram (max coverage on count
// ties); dup: union of spans of every n-gram occurring at least twice.
double top_ngram_char_frac(const std::string& text, int n);
double dup_ngram_char_frac(const std::string& text, int n);

// Document-wise measurements.
std::size_t word_count(const std::string& text);
double mean_word_len(const std::string& text);
double symbol_word_ratio(const std::string& text, const std::vector<std::string>& symbols);
double bullet_line_frac(const std::string& text);
double ellipsis_line_frac(const std::string& text);
double alpha_word_frac(const std::string& text);
std::size_t stopword_hits(const std::string& text, const std::set<std::string>& stopwords);

// Line-based measurements.
double number_frac(const std::string& text);
double uppercase_line_frac(const std::string& text);
double avg_words_per_line(const std::string& text);
double boilerplate_para_frac(const std::string& text, const std::vector<std::string>& needles);

// Shingling: whitespace runs collapsed to single spaces, ends trimmed, then
// every 23-code-point window; shorter texts give one whole-text shingle.
std::set<std::string> shingle_set(const std::string& text);
double jaccard(const std::set<std::string>& a, const std::set<std::string>& b);

// Connected components by breadth-first search; every node maps to the
// lexicographically smallest id of its component.
std::map<std::string, std::string> bfs_components(
    const std::vector<std::pair<std::string, std::string>>& edges);

// Nearest-rank percentile: smallest value whose rank >= ceil(p * n).
double percentile_nearest_rank(std::vector<double> values, double p);

struct LabelMetrics {
    double precision = 0.0;
    double recall = 0.0;
};

// Per-label precision/recall from (predicted, truth) pairs.
std::map<std::string, LabelMetrics> confusion_metrics(
    const std::vector<std::pair<std::string, std::string>>& pred_truth);

}  // namespace korpus::test::oracle
