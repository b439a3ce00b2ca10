#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "korpus/dedup.hpp"
#include "korpus/heuristic_filters.hpp"

namespace korpus {

// Canonical stage order. A config may only reorder stages when it sets
// allow_reorder, and dedup stages always run after the per-document ones.
inline constexpr std::array<std::string_view, 8> kStageOrder = {
    "url", "extract", "lang", "repetition", "document", "line", "exact_dedup", "fuzzy_dedup"};

bool is_known_stage(std::string_view name);

struct UrlStageConfig {
    std::string blocked_domains_path;
    std::string blocked_words_path;
    std::string hq_domains_path;
    double word_threshold = 1.0;
};

struct LangStageConfig {
    std::string model_path;
    std::string target = "de";
    double min_score = 0.0;
};

struct FuzzyStageConfig {
    uint64_t minhash_seed = kDefaultMinHashSeed;
    size_t max_bucket = kDefaultMaxBucket;
    double verify_jaccard = 0.0;
};

struct PipelineConfig {
    std::string input;
    std::string input_format = "jsonl";  // jsonl | wet
    std::string output_dir;

    int shards = 1;
    uint64_t seed = 42;
    std::string dedup_scope = "global";  // global | dump (per source_tag)
    bool resume = false;

    std::vector<std::string> stage_order{kStageOrder.begin(), kStageOrder.end()};
    bool allow_reorder = false;
    std::map<std::string, bool> stages;  // defaults: every known stage on

    FilterConfig filters;
    UrlStageConfig url;
    LangStageConfig lang;
    FuzzyStageConfig fuzzy;

    PipelineConfig();

    bool stage_enabled(std::string_view name) const;

    nlohmann::ordered_json to_json() const;
    static PipelineConfig from_json(const nlohmann::ordered_json& j);

    // Human-readable problems; empty means the config is runnable.
    std::vector<std::string> validate() const;
};

void write_pipeline_config(const std::string& path, const PipelineConfig& config);
PipelineConfig read_pipeline_config(const std::string& path);

struct StageReport {
    std::string stage;
    uint64_t docs_in = 0;
    uint64_t docs_out = 0;
    std::map<std::string, uint64_t> reasons;  // rejection reason -> count

    StageReport& operator+=(const StageReport& other);
};

struct PipelineReport {
    uint64_t docs_in = 0;
    uint64_t docs_out = 0;
    std::vector<StageReport> stages;

    nlohmann::ordered_json to_json() const;
    static PipelineReport from_json(const nlohmann::ordered_json& j);

    // Fixed-width per-stage table for terminal output.
    std::string summary() const;
};

void write_pipeline_report(const std::string& path, const PipelineReport& report);
PipelineReport read_pipeline_report(const std::string& path);

// Runs the enabled stages over the input corpus: documents are split
// round-robin across shards, per-document stages run one worker per shard,
// shard outputs merge back into input order, and the dedup stages run as
// global reductions (or per source_tag with dedup_scope = dump). Artifacts
// land under <output_dir>/work, the surviving documents in
// <output_dir>/kept.jsonl and the report in <output_dir>/report.json.
// With resume = true, phases whose artifacts are complete are skipped, so
// an interrupted run can be restarted without duplicating output.
PipelineReport run_pipeline(const PipelineConfig& config);

}  // namespace korpus
