#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "korpus/document.hpp"

namespace korpus {

// Three-part chat scaffold for the German quality judge. The assistant
// primer ends with an opening brace so the model continues the JSON object.
struct JudgePrompt {
    std::string system;
    std::string user;
    std::string assistant_primer;
};

JudgePrompt build_judge_prompt_parts(const Document& doc);

// Flat rendition (SYSTEM/USER/ASSISTANT sections joined); ends with the
// primer "Bewertungs-JSON:\n\n{". `{document}` substitution is literal.
std::string build_judge_prompt(const Document& doc);

struct JudgeVerdict {
    int content_grade = 0;
    int language_grade = 0;
    int orthography_grade = 0;
    std::string content_criticism;
    std::string language_criticism;
    std::string orthography_criticism;
};

// Tolerant extraction: first balanced JSON object anywhere in the response,
// retried with the primer's "{" prepended (judges often continue mid-object).
// Grades are coerced to integers and must be in 1..5. On failure returns
// nullopt and, if given, sets *error to a short reason ("judge-parse: …").
std::optional<JudgeVerdict> parse_judge_response(std::string_view raw,
                                                 std::string* error = nullptr);

// Combined educational score: minimum of the three grades.
int edu_score(const JudgeVerdict& verdict);

// Nearest-rank percentile over the full distribution (default: 85th, the
// top-15% cutoff). Throws std::runtime_error below 20 values.
double instr_percentile_threshold(const std::vector<double>& probs, double percentile = 0.85);

struct QualityThresholds {
    double instr_bert = 0.0;
    double instr_ft = 0.0;
    double percentile = 0.85;
    size_t sample_count = 0;
};

void write_thresholds(const std::string& path, const QualityThresholds& thresholds);
QualityThresholds read_thresholds(const std::string& path);

struct QualityScorecard {
    std::string doc_id;
    std::optional<int> edu_bert_score;             // 1..5
    std::optional<double> edu_ft_conf;             // P(high quality)
    std::optional<std::string> grammar_bert_label;  // "high" | "low"
    std::optional<double> grammar_ft_conf;         // P(high quality)
    std::optional<double> instr_bert_prob;
    std::optional<double> instr_ft_prob;
    int overall_points = 0;
    std::string bucket;
};

// Point rules, evaluated independently; absent signals contribute nothing:
//   +3  edu_bert_score == 5
//   +2  edu_ft_conf    >  0.99 (strict)
//   +3  grammar_bert_label == "high"
//   +2  grammar_ft_conf > 0.99 (strict)
//   +6  instr_bert_prob >= thresholds.instr_bert
//   +4  instr_ft_prob   >= thresholds.instr_ft
int overall_points(const QualityScorecard& card, const QualityThresholds& thresholds);

// >=12 high, 9-11 medium-high, 5-8 medium, 3-4 medium-low, <3 low.
std::string bucketize(int points);

// Bucket rank for ordering checks: low=0 … high=4.
int bucket_rank(const std::string& bucket);

// Fills overall_points and bucket in place.
void finalize_scorecard(QualityScorecard& card, const QualityThresholds& thresholds);

// Scorecards as JSONL, one object per document.
void write_scorecards(const std::string& path, const std::vector<QualityScorecard>& cards);
std::vector<QualityScorecard> read_scorecards(const std::string& path);

}  // namespace korpus
