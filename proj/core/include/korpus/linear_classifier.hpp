#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "korpus/lang_id.hpp"

namespace korpus {

// Logistic (softmax) regression over hashed sparse features: word unigrams
// and bigrams plus character 3-5-grams, bucketed into 2^21 slots. Stands in
// for a fastText-style supervised classifier with no external dependencies.
struct LinearModel {
    std::vector<std::string> labels;
    uint32_t bucket_bits = 21;
    std::vector<std::vector<double>> weights;  // label × bucket
    std::vector<double> bias;                  // per label

    uint32_t bucket_count() const { return uint32_t{1} << bucket_bits; }
};

struct TrainOptions {
    int epochs = 5;
    double learning_rate = 0.5;
    double val_fraction = 0.05;
    uint64_t seed = 7;
    uint32_t bucket_bits = 21;
    bool balance = true;  // downsample every class to the minority count
};

struct PrecisionRecall {
    double precision = 0.0;
    double recall = 0.0;
};

struct TrainResult {
    LinearModel model;
    std::map<std::string, PrecisionRecall> validation;
    double validation_accuracy = 0.0;
    std::vector<double> epoch_losses;  // full-pass cross-entropy after each epoch
    std::vector<std::pair<std::string, std::string>> val_pred_truth;
};

// SGD with linearly decaying learning rate and a deterministic shuffle.
// Throws std::invalid_argument on fewer than two labels or bad options.
TrainResult train_classifier(const std::vector<LabeledText>& data,
                             const TrainOptions& options = {});

struct Prediction {
    std::string label;
    double probability = 0.0;
};

// Softmax probabilities aligned with model.labels; empty text scores bias
// only.
std::vector<double> predict_scores(const LinearModel& model, std::string_view text);
Prediction predict(const LinearModel& model, std::string_view text);

// Binary model file, magic "KLINCL01", little-endian, sparse per-label
// weights, plus a JSON sidecar at <path>.json.
void save_linear_model(const LinearModel& model, const std::string& path);
LinearModel load_linear_model(const std::string& path);

// Externally computed transformer scores joined by doc id.
struct ExternalScoreRecord {
    std::optional<int> edu_bert_score;            // 1..5
    std::optional<std::string> grammar_bert_label;  // "high" | "low"
    std::optional<double> instr_bert_prob;        // [0,1]
};

struct ExternalScores {
    std::unordered_map<std::string, ExternalScoreRecord> by_doc;
    size_t rejected = 0;
};

// JSONL with fields doc_id and any of edu_bert_score, grammar_bert_label,
// instr_bert_prob. Records with a missing doc_id or any out-of-range field
// are rejected and counted, not fatal.
ExternalScores load_external_scores(const std::string& path);

}  // namespace korpus
