#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "korpus/document.hpp"

// Repetition, document-wise and line-based quality filters with the German
// web-corpus thresholds as defaults. Shared measurement contract:
//
//   chars       Unicode code points, counted over the whole text
//   words       maximal runs of non-whitespace code points (ASCII whitespace)
//   lines       segments between runs of '\n', empty segments dropped
//   paragraphs  segments between runs of 2+ '\n', empty segments dropped
//   duplicate   element equal to any earlier element of the same sequence
//
// Every fraction is computed as one integer numerator over one integer
// denominator with a single final division, and a measured value exactly
// equal to its threshold is KEPT (all comparisons are strict).

namespace korpus {

struct FilterConfig {
    // Repetition thresholds (reject when measured > threshold).
    double dup_line_frac = 0.282;              // duplicate lines / lines
    double dup_para_frac_lines = 0.300;        // lines inside duplicate paragraphs / lines
    double dup_para_frac_paras = 0.200;        // duplicate paragraphs / paragraphs
    double repeated_char_line_frac = 0.200;    // chars inside duplicate lines / chars
    std::map<int, double> top_ngram_char_frac = {{2, 0.077}, {3, 0.101}, {4, 0.123}};
    std::map<int, double> dup_ngram_char_frac = {{5, 0.142}, {6, 0.127}, {7, 0.115},
                                                 {8, 0.106}, {9, 0.097}, {10, 0.088}};

    // Document-wise thresholds.
    std::uint64_t min_words = 50;      // reject when words < min
    std::uint64_t max_words = 100000;  // reject when words > max
    double max_mean_word_len = 14.0;
    double max_symbol_word_ratio = 0.1;
    // "..." and the single-codepoint ellipsis are both counted.
    std::vector<std::string> symbols = {"#", "...", "…"};
    double max_bullet_line_frac = 0.90;
    double max_ellipsis_line_frac = 0.30;
    double min_alpha_word_frac = 0.774;
    std::set<std::string> stopwords = {"der", "und", "die", "in",  "von", "im",    "den", "des",
                                       "mit", "das", "er",  "dem", "als", "wurde", "für"};
    std::uint64_t min_stopword_hits = 2;  // token occurrences, not distinct words

    // Line-based thresholds.
    double max_number_frac = 0.15;           // digit chars / non-whitespace chars
    double max_uppercase_line_frac = 0.50;   // lines whose alphabetic chars are >50% uppercase
    double min_avg_words_per_line = 10.0;
    double max_boilerplate_para_frac = 0.40;
    std::vector<std::string> boilerplate_strings = {
        "nutzungsbedingungen", "datenschutzerklärung", "cookie-richtlinie", "alle rechte vorbehalten",
        "terms of use",        "privacy policy",       "cookie policy",     "all rights reserved"};

    nlohmann::ordered_json to_json() const;
    static FilterConfig from_json(const nlohmann::ordered_json& j);

    // Returns human-readable problems; empty means the config is valid.
    std::vector<std::string> validate() const;
};

// The 13 repetition rules, evaluated in table order; the first violated rule
// becomes the rejection reason and all 13 measured values are recorded.
FilterOutcome repetition_filter(const Document& doc, const FilterConfig& cfg);

// The 7 document-wise rules in order: word count range, mean word length,
// symbol-to-word ratio, bullet lines, ellipsis lines, alphabetic words,
// stopword hits.
FilterOutcome document_filter(const Document& doc, const FilterConfig& cfg);

// The 4 line-based rules in order: number fraction, uppercase lines, average
// words per line, boilerplate paragraphs. Whole-document removal.
FilterOutcome line_filter(const Document& doc, const FilterConfig& cfg);

}  // namespace korpus
