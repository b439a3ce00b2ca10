#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "korpus/document.hpp"

namespace korpus {

// Multinomial naive Bayes over character n-grams (code points), hash-bucketed
// for a fixed memory footprint. Immutable after training; classification is
// pure and concurrent-safe.
struct LangModel {
    std::vector<std::string> languages;
    int ngram_min = 1;
    int ngram_max = 5;
    double smoothing_k = 0.5;
    uint32_t bucket_bits = 20;

    std::vector<double> log_priors;                              // per language
    std::vector<double> default_log_likelihood;                  // unseen bucket, per language
    std::vector<std::unordered_map<uint32_t, double>> weights;   // bucket -> log likelihood
    std::vector<uint64_t> trained_docs;                          // per language

    uint32_t bucket_count() const { return uint32_t{1} << bucket_bits; }
};

struct LabeledText {
    std::string text;
    std::string language;
};

// Trains from labelled texts. Requires at least two distinct languages and
// k > 0; throws std::invalid_argument otherwise. Languages are stored sorted
// so training order does not matter.
LangModel train_lang_model(const std::vector<LabeledText>& corpus,
                           int ngram_min = 1, int ngram_max = 5,
                           double smoothing_k = 0.5, uint32_t bucket_bits = 20);

// Softmax-normalized probabilities aligned with model.languages. Empty text
// carries no evidence, so the result equals the prior mass.
std::vector<double> language_scores(const LangModel& model, std::string_view text);

struct LangScore {
    std::string language;
    double score = 0.0;
};

// Argmax language and its normalized score; sets doc.language.
LangScore classify_language(Document& doc, const LangModel& model);

// Keeps the document iff the argmax language equals `target`. min_score = 0
// disables the confidence cutoff (the default: pure argmax). On rejection
// the detected language lands in doc.language and the outcome reason is
// "lang".
FilterOutcome filter_language(Document& doc, const LangModel& model,
                              const std::string& target = "de",
                              double min_score = 0.0);

// Binary model file: 8-byte magic "KLIDMD01", little-endian fields, plus a
// JSON sidecar at <path>.json describing languages, ngram_range and k.
void save_lang_model(const LangModel& model, const std::string& path);
LangModel load_lang_model(const std::string& path);

}  // namespace korpus
