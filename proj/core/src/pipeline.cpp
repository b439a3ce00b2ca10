#include "korpus/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "korpus/corpus_io.hpp"
#include "korpus/html_text.hpp"
#include "korpus/lang_id.hpp"
#include "korpus/url_filter.hpp"

namespace korpus {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr const char* kOrdinalKey = "__ordinal";

bool is_per_doc_stage(std::string_view name) {
    return name == "url" || name == "extract" || name == "lang" || name == "repetition" ||
           name == "document" || name == "line";
}

fs::path shard_path(const fs::path& work, const char* phase, int shard) {
    char name[64];
    std::snprintf(name, sizeof name, "%s-shard-%04d.jsonl", phase, shard);
    return work / name;
}

bool artifact_complete(const fs::path& path) {
    return fs::exists(path) && !fs::exists(fs::path(path.string() + ".partial"));
}

uint64_t doc_ordinal(const Document& doc) {
    return doc.annotations.at(kOrdinalKey).get<uint64_t>();
}

ordered_json stage_report_to_json(const StageReport& report) {
    ordered_json j = ordered_json::object();
    j["stage"] = report.stage;
    j["docs_in"] = report.docs_in;
    j["docs_out"] = report.docs_out;
    j["reasons"] = ordered_json::object();
    for (const auto& [reason, count] : report.reasons) j["reasons"][reason] = count;
    return j;
}

StageReport stage_report_from_json(const ordered_json& j) {
    StageReport report;
    report.stage = j.at("stage").get<std::string>();
    report.docs_in = j.at("docs_in").get<uint64_t>();
    report.docs_out = j.at("docs_out").get<uint64_t>();
    for (const auto& [reason, count] : j.at("reasons").items()) {
        report.reasons[reason] = count.get<uint64_t>();
    }
    return report;
}

void write_phase_stats(const fs::path& path, const std::vector<StageReport>& stages) {
    ordered_json j = ordered_json::object();
    j["stages"] = ordered_json::array();
    for (const auto& stage : stages) j["stages"].push_back(stage_report_to_json(stage));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

std::vector<StageReport> read_phase_stats(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    ordered_json j = ordered_json::parse(in);
    std::vector<StageReport> stages;
    for (const auto& item : j.at("stages")) stages.push_back(stage_report_from_json(item));
    return stages;
}

// Replays shard files in input order: each shard is ordinal-sorted, so a
// heap over the shard heads restores the global sequence.
class OrdinalMergeReader : public CorpusReader {
  public:
    explicit OrdinalMergeReader(const std::vector<fs::path>& files) : heads_(files.size()) {
        for (const auto& file : files) readers_.push_back(open_jsonl(file));
        for (size_t i = 0; i < readers_.size(); ++i) advance(i);
    }

    std::optional<Document> next() override {
        if (heap_.empty()) return std::nullopt;
        auto [ordinal, index] = heap_.top();
        heap_.pop();
        Document doc = std::move(heads_[index]);
        advance(index);
        return doc;
    }

    std::uint64_t malformed_count() const override { return 0; }

  private:
    void advance(size_t index) {
        if (auto doc = readers_[index]->next()) {
            heap_.emplace(doc_ordinal(*doc), index);
            heads_[index] = std::move(*doc);
        }
    }

    std::vector<std::unique_ptr<CorpusReader>> readers_;
    std::vector<Document> heads_;
    std::priority_queue<std::pair<uint64_t, size_t>, std::vector<std::pair<uint64_t, size_t>>,
                        std::greater<>>
        heap_;
};

struct PerDocStage {
    std::string name;
    StageReport report;
};

// Per-document stages for one shard, applied in configured order.
class ShardFilter {
  public:
    ShardFilter(const PipelineConfig& config, const std::vector<std::string>& stage_names,
                const UrlRules* url_rules, const LangModel* lang_model)
        : config_(config), url_rules_(url_rules), lang_model_(lang_model) {
        for (const auto& name : stage_names) stages_.push_back({name, {name, 0, 0, {}}});
    }

    bool process(Document& doc) {
        for (auto& stage : stages_) {
            ++stage.report.docs_in;
            FilterOutcome outcome = apply(stage.name, doc);
            if (!outcome.keep) {
                ++stage.report.reasons[outcome.reason];
                return false;
            }
            ++stage.report.docs_out;
        }
        return true;
    }

    std::vector<StageReport> reports() const {
        std::vector<StageReport> out;
        for (const auto& stage : stages_) out.push_back(stage.report);
        return out;
    }

  private:
    FilterOutcome apply(const std::string& name, Document& doc) {
        if (name == "url") return filter_url(doc, *url_rules_);
        if (name == "extract") {
            if (doc.raw_html) {
                doc.text = html_to_text(*doc.raw_html);
                doc.raw_html.reset();
            }
            return FilterOutcome::kept();
        }
        if (name == "lang")
            return filter_language(doc, *lang_model_, config_.lang.target, config_.lang.min_score);
        if (name == "repetition") return repetition_filter(doc, config_.filters);
        if (name == "document") return document_filter(doc, config_.filters);
        if (name == "line") return line_filter(doc, config_.filters);
        throw std::logic_error("unknown per-document stage: " + name);
    }

    const PipelineConfig& config_;
    const UrlRules* url_rules_;
    const LangModel* lang_model_;
    std::vector<PerDocStage> stages_;
};

std::string scope_key(const PipelineConfig& config, const Document& doc) {
    return config.dedup_scope == "dump" ? doc.source_tag : std::string();
}

}  // namespace

bool is_known_stage(std::string_view name) {
    return std::find(kStageOrder.begin(), kStageOrder.end(), name) != kStageOrder.end();
}

PipelineConfig::PipelineConfig() {
    for (auto name : kStageOrder) stages[std::string(name)] = true;
}

bool PipelineConfig::stage_enabled(std::string_view name) const {
    auto it = stages.find(std::string(name));
    return it != stages.end() && it->second;
}

ordered_json PipelineConfig::to_json() const {
    ordered_json j = ordered_json::object();
    j["input"] = input;
    j["input_format"] = input_format;
    j["output_dir"] = output_dir;
    j["shards"] = shards;
    j["seed"] = seed;
    j["dedup_scope"] = dedup_scope;
    j["resume"] = resume;
    j["stage_order"] = stage_order;
    j["allow_reorder"] = allow_reorder;
    j["stages"] = ordered_json::object();
    for (const auto& [name, enabled] : stages) j["stages"][name] = enabled;
    j["url"] = {{"blocked_domains", url.blocked_domains_path},
                {"blocked_words", url.blocked_words_path},
                {"hq_domains", url.hq_domains_path},
                {"word_threshold", url.word_threshold}};
    j["lang"] = {{"model", lang.model_path},
                 {"target", lang.target},
                 {"min_score", lang.min_score}};
    j["fuzzy"] = {{"minhash_seed", fuzzy.minhash_seed},
                  {"max_bucket", fuzzy.max_bucket},
                  {"verify_jaccard", fuzzy.verify_jaccard}};
    j["filters"] = filters.to_json();
    return j;
}

PipelineConfig PipelineConfig::from_json(const ordered_json& j) {
    PipelineConfig config;
    if (j.contains("input")) config.input = j.at("input").get<std::string>();
    if (j.contains("input_format")) config.input_format = j.at("input_format").get<std::string>();
    if (j.contains("output_dir")) config.output_dir = j.at("output_dir").get<std::string>();
    if (j.contains("shards")) config.shards = j.at("shards").get<int>();
    if (j.contains("seed")) config.seed = j.at("seed").get<uint64_t>();
    if (j.contains("dedup_scope")) config.dedup_scope = j.at("dedup_scope").get<std::string>();
    if (j.contains("resume")) config.resume = j.at("resume").get<bool>();
    if (j.contains("stage_order"))
        config.stage_order = j.at("stage_order").get<std::vector<std::string>>();
    if (j.contains("allow_reorder")) config.allow_reorder = j.at("allow_reorder").get<bool>();
    if (j.contains("stages")) {
        for (const auto& [name, enabled] : j.at("stages").items()) {
            config.stages[name] = enabled.get<bool>();
        }
    }
    if (j.contains("url")) {
        const auto& u = j.at("url");
        if (u.contains("blocked_domains"))
            config.url.blocked_domains_path = u.at("blocked_domains").get<std::string>();
        if (u.contains("blocked_words"))
            config.url.blocked_words_path = u.at("blocked_words").get<std::string>();
        if (u.contains("hq_domains"))
            config.url.hq_domains_path = u.at("hq_domains").get<std::string>();
        if (u.contains("word_threshold"))
            config.url.word_threshold = u.at("word_threshold").get<double>();
    }
    if (j.contains("lang")) {
        const auto& l = j.at("lang");
        if (l.contains("model")) config.lang.model_path = l.at("model").get<std::string>();
        if (l.contains("target")) config.lang.target = l.at("target").get<std::string>();
        if (l.contains("min_score")) config.lang.min_score = l.at("min_score").get<double>();
    }
    if (j.contains("fuzzy")) {
        const auto& f = j.at("fuzzy");
        if (f.contains("minhash_seed"))
            config.fuzzy.minhash_seed = f.at("minhash_seed").get<uint64_t>();
        if (f.contains("max_bucket")) config.fuzzy.max_bucket = f.at("max_bucket").get<size_t>();
        if (f.contains("verify_jaccard"))
            config.fuzzy.verify_jaccard = f.at("verify_jaccard").get<double>();
    }
    if (j.contains("filters")) config.filters = FilterConfig::from_json(j.at("filters"));
    return config;
}

std::vector<std::string> PipelineConfig::validate() const {
    std::vector<std::string> problems = filters.validate();
    if (shards < 1) problems.push_back("shards must be at least 1");
    if (input_format != "jsonl" && input_format != "wet")
        problems.push_back("input_format must be jsonl or wet");
    if (dedup_scope != "global" && dedup_scope != "dump")
        problems.push_back("dedup_scope must be global or dump");
    for (const auto& [name, enabled] : stages) {
        if (!is_known_stage(name)) problems.push_back("unknown stage: " + name);
    }
    std::set<std::string> order_set(stage_order.begin(), stage_order.end());
    if (order_set.size() != stage_order.size())
        problems.push_back("stage_order contains duplicates");
    for (const auto& name : stage_order) {
        if (!is_known_stage(name)) problems.push_back("unknown stage in stage_order: " + name);
    }
    if (order_set.size() == stage_order.size() && stage_order.size() != kStageOrder.size())
        problems.push_back("stage_order must list all stages");
    if (stage_order.size() == kStageOrder.size()) {
        bool canonical = std::equal(stage_order.begin(), stage_order.end(), kStageOrder.begin());
        if (!canonical && !allow_reorder)
            problems.push_back("stage_order deviates from the canonical order; "
                               "set allow_reorder to confirm");
        if (stage_order.size() >= 2 &&
            (stage_order[stage_order.size() - 2] != "exact_dedup" ||
             stage_order.back() != "fuzzy_dedup"))
            problems.push_back("dedup stages must stay last, in exact -> fuzzy order");
    }
    if (stage_enabled("lang") && lang.model_path.empty())
        problems.push_back("lang stage is enabled but lang.model is not set");
    if (fuzzy.verify_jaccard < 0.0 || fuzzy.verify_jaccard > 1.0)
        problems.push_back("fuzzy.verify_jaccard must lie in [0, 1]");
    if (fuzzy.max_bucket < 2) problems.push_back("fuzzy.max_bucket must be at least 2");
    if (url.word_threshold <= 0.0) problems.push_back("url.word_threshold must be positive");
    return problems;
}

void write_pipeline_config(const std::string& path, const PipelineConfig& config) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << config.to_json().dump(2) << '\n';
}

PipelineConfig read_pipeline_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return PipelineConfig::from_json(ordered_json::parse(in));
}

StageReport& StageReport::operator+=(const StageReport& other) {
    docs_in += other.docs_in;
    docs_out += other.docs_out;
    for (const auto& [reason, count] : other.reasons) reasons[reason] += count;
    return *this;
}

ordered_json PipelineReport::to_json() const {
    ordered_json j = ordered_json::object();
    j["docs_in"] = docs_in;
    j["docs_out"] = docs_out;
    j["stages"] = ordered_json::array();
    for (const auto& stage : stages) j["stages"].push_back(stage_report_to_json(stage));
    return j;
}

PipelineReport PipelineReport::from_json(const ordered_json& j) {
    PipelineReport report;
    report.docs_in = j.at("docs_in").get<uint64_t>();
    report.docs_out = j.at("docs_out").get<uint64_t>();
    for (const auto& item : j.at("stages")) report.stages.push_back(stage_report_from_json(item));
    return report;
}

std::string PipelineReport::summary() const {
    std::ostringstream out;
    char line[160];
    std::snprintf(line, sizeof line, "%-12s %12s %12s  %s\n", "stage", "docs_in", "docs_out",
                  "top rejection");
    out << line;
    for (const auto& stage : stages) {
        std::string top;
        uint64_t top_count = 0;
        for (const auto& [reason, count] : stage.reasons) {
            if (count > top_count) {
                top = reason;
                top_count = count;
            }
        }
        std::string note = top.empty() ? "" : top + " (" + std::to_string(top_count) + ")";
        std::snprintf(line, sizeof line, "%-12s %12llu %12llu  %s\n", stage.stage.c_str(),
                      static_cast<unsigned long long>(stage.docs_in),
                      static_cast<unsigned long long>(stage.docs_out), note.c_str());
        out << line;
    }
    std::snprintf(line, sizeof line, "%-12s %12llu %12llu\n", "total",
                  static_cast<unsigned long long>(docs_in),
                  static_cast<unsigned long long>(docs_out));
    out << line;
    return out.str();
}

void write_pipeline_report(const std::string& path, const PipelineReport& report) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << report.to_json().dump(2) << '\n';
}

PipelineReport read_pipeline_report(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    return PipelineReport::from_json(ordered_json::parse(in));
}

PipelineReport run_pipeline(const PipelineConfig& config) {
    auto problems = config.validate();
    if (!problems.empty()) {
        std::string joined = "invalid pipeline config:";
        for (const auto& p : problems) joined += "\n  - " + p;
        throw std::invalid_argument(joined);
    }
    if (config.input.empty()) throw std::invalid_argument("config.input is not set");
    if (config.output_dir.empty()) throw std::invalid_argument("config.output_dir is not set");

    const fs::path out_dir = config.output_dir;
    const fs::path work = out_dir / "work";
    const fs::path fingerprint = work / "config.json";

    // A config fingerprint guards resumed runs against mixed artifacts.
    PipelineConfig canonical = config;
    canonical.resume = false;
    const std::string fingerprint_dump = canonical.to_json().dump(2) + "\n";
    bool resuming = config.resume;
    if (resuming && fs::exists(fingerprint)) {
        std::ifstream in(fingerprint);
        std::ostringstream buf;
        buf << in.rdbuf();
        if (buf.str() != fingerprint_dump)
            throw std::runtime_error("resume requested but the work directory was produced by a "
                                     "different config: " + fingerprint.string());
    } else {
        resuming = false;
        std::error_code ec;
        fs::remove_all(work, ec);
        fs::remove(out_dir / "kept.jsonl", ec);
        fs::remove(out_dir / "report.json", ec);
    }
    fs::create_directories(work);
    if (!fs::exists(fingerprint)) {
        std::ofstream out(fingerprint);
        out << fingerprint_dump;
    }

    std::vector<std::string> per_doc_stages;
    for (const auto& name : config.stage_order) {
        if (is_per_doc_stage(name) && config.stage_enabled(name)) per_doc_stages.push_back(name);
    }

    // Stage resources are loaded once and shared read-only by the workers.
    UrlRules url_rules;
    if (config.stage_enabled("url")) {
        url_rules = load_url_rules(config.url.blocked_domains_path, config.url.blocked_words_path,
                                   config.url.hq_domains_path, config.url.word_threshold);
    }
    LangModel lang_model;
    if (config.stage_enabled("lang")) lang_model = load_lang_model(config.lang.model_path);

    const int shards = config.shards;
    std::vector<fs::path> ingest_shards, filter_shards;
    for (int i = 0; i < shards; ++i) {
        ingest_shards.push_back(shard_path(work, "ingest", i));
        filter_shards.push_back(shard_path(work, "filter", i));
    }

    // Phase 1: split the input round-robin, tagging each document with its
    // input ordinal so later merges can restore the original order.
    const fs::path ingest_stats_path = work / "ingest.stats.json";
    StageReport ingest_report{"ingest", 0, 0, {}};
    bool ingest_done = resuming && fs::exists(ingest_stats_path) &&
                       std::all_of(ingest_shards.begin(), ingest_shards.end(), artifact_complete);
    if (ingest_done) {
        ingest_report = read_phase_stats(ingest_stats_path).at(0);
    } else {
        auto reader = open_corpus(config.input, parse_corpus_format(config.input_format));
        std::vector<std::unique_ptr<JsonlWriter>> writers;
        for (int i = 0; i < shards; ++i)
            writers.push_back(std::make_unique<JsonlWriter>(ingest_shards[i]));
        uint64_t ordinal = 0;
        while (auto doc = reader->next()) {
            doc->annotations[kOrdinalKey] = ordinal;
            writers[ordinal % shards]->write(*doc);
            ++ordinal;
        }
        for (auto& writer : writers) writer->close();
        ingest_report.docs_in = ordinal + reader->malformed_count();
        ingest_report.docs_out = ordinal;
        if (reader->malformed_count() > 0)
            ingest_report.reasons["malformed"] = reader->malformed_count();
        write_phase_stats(ingest_stats_path, {ingest_report});
    }

    // Phase 2: per-document stages, one worker per shard.
    const fs::path filter_stats_path = work / "filter.stats.json";
    std::vector<StageReport> filter_reports;
    const bool run_filter_phase = !per_doc_stages.empty();
    if (run_filter_phase) {
        bool filter_done = resuming && fs::exists(filter_stats_path) &&
                           std::all_of(filter_shards.begin(), filter_shards.end(),
                                       artifact_complete);
        if (filter_done) {
            filter_reports = read_phase_stats(filter_stats_path);
        } else {
            std::vector<ShardFilter> filters;
            filters.reserve(shards);
            for (int i = 0; i < shards; ++i)
                filters.emplace_back(config, per_doc_stages, &url_rules, &lang_model);
            std::vector<std::exception_ptr> failures(shards);
            auto shard_worker = [&](int i) {
                try {
                    auto reader = open_jsonl(ingest_shards[i]);
                    JsonlWriter writer(filter_shards[i]);
                    while (auto doc = reader->next()) {
                        if (filters[i].process(*doc)) writer.write(*doc);
                    }
                    writer.close();
                } catch (...) {
                    failures[i] = std::current_exception();
                }
            };
            if (shards == 1) {
                shard_worker(0);
            } else {
                std::vector<std::thread> pool;
                for (int i = 0; i < shards; ++i) pool.emplace_back(shard_worker, i);
                for (auto& th : pool) th.join();
            }
            for (auto& failure : failures) {
                if (failure) std::rethrow_exception(failure);
            }
            for (int i = 0; i < shards; ++i) {
                auto reports = filters[i].reports();
                if (filter_reports.empty()) {
                    filter_reports = reports;
                } else {
                    for (size_t s = 0; s < reports.size(); ++s) filter_reports[s] += reports[s];
                }
            }
            write_phase_stats(filter_stats_path, filter_reports);
        }
    }

    const std::vector<fs::path>& merged_shards = run_filter_phase ? filter_shards : ingest_shards;
    auto open_merged = [&] { return std::make_unique<OrdinalMergeReader>(merged_shards); };

    // Phase 3: exact deduplication as a global (or per-dump) reduction.
    const fs::path exact_path = work / "exact.jsonl";
    const fs::path exact_stats_path = work / "exact.stats.json";
    std::optional<StageReport> exact_report;
    if (config.stage_enabled("exact_dedup")) {
        if (resuming && fs::exists(exact_stats_path) && artifact_complete(exact_path)) {
            exact_report = read_phase_stats(exact_stats_path).at(0);
        } else {
            StageReport report{"exact_dedup", 0, 0, {}};
            std::map<std::string, ExactDeduper> dedupers;
            auto reader = open_merged();
            JsonlWriter writer(exact_path);
            while (auto doc = reader->next()) {
                ++report.docs_in;
                if (dedupers[scope_key(config, *doc)].admit(*doc)) {
                    ++report.docs_out;
                    writer.write(*doc);
                } else {
                    ++report.reasons["exact-duplicate"];
                }
            }
            writer.close();
            write_phase_stats(exact_stats_path, {report});
            exact_report = report;
        }
    }

    // Phase 4: fuzzy deduplication. First pass signs every document and
    // builds the collision graph; second pass drops the non-winners.
    const fs::path fuzzy_path = work / "fuzzy.jsonl";
    const fs::path fuzzy_stats_path = work / "fuzzy.stats.json";
    std::optional<StageReport> fuzzy_report;
    if (config.stage_enabled("fuzzy_dedup")) {
        auto open_fuzzy_input = [&]() -> std::unique_ptr<CorpusReader> {
            if (config.stage_enabled("exact_dedup")) return open_jsonl(exact_path);
            return open_merged();
        };
        if (resuming && fs::exists(fuzzy_stats_path) && artifact_complete(fuzzy_path)) {
            fuzzy_report = read_phase_stats(fuzzy_stats_path).at(0);
        } else {
            const auto seeds = minhash_seeds(config.fuzzy.minhash_seed);
            std::map<std::string, std::vector<MinHashSignature>> groups;
            {
                auto reader = open_fuzzy_input();
                while (auto doc = reader->next()) {
                    groups[scope_key(config, *doc)].push_back(
                        minhash(doc->id, doc->text, seeds));
                }
            }
            std::vector<MinHashSignature> all_signatures;
            std::vector<Edge> all_edges;
            std::set<std::string> removals;
            for (const auto& [tag, signatures] : groups) {
                auto lsh = lsh_candidates(signatures, config.fuzzy.max_bucket,
                                          config.fuzzy.verify_jaccard);
                auto graph = connected_components(std::move(lsh.edges));
                for (const auto& id : removal_list(graph)) removals.insert(id);
                all_edges.insert(all_edges.end(), graph.edges.begin(), graph.edges.end());
                all_signatures.insert(all_signatures.end(), signatures.begin(), signatures.end());
            }
            write_signatures((work / "signatures.bin").string(), all_signatures);
            write_edges((work / "edges.jsonl").string(), all_edges);
            write_removal_list((work / "removal.txt").string(),
                               {removals.begin(), removals.end()});

            StageReport report{"fuzzy_dedup", 0, 0, {}};
            auto reader = open_fuzzy_input();
            JsonlWriter writer(fuzzy_path);
            while (auto doc = reader->next()) {
                ++report.docs_in;
                if (removals.count(doc->id)) {
                    ++report.reasons["fuzzy-duplicate"];
                } else {
                    ++report.docs_out;
                    writer.write(*doc);
                }
            }
            writer.close();
            write_phase_stats(fuzzy_stats_path, {report});
            fuzzy_report = report;
        }
    }

    // Phase 5: strip the ordinal tags and emit the survivors.
    const fs::path kept_path = out_dir / "kept.jsonl";
    uint64_t kept_count = 0;
    {
        std::unique_ptr<CorpusReader> reader;
        if (config.stage_enabled("fuzzy_dedup")) reader = open_jsonl(fuzzy_path);
        else if (config.stage_enabled("exact_dedup")) reader = open_jsonl(exact_path);
        else reader = open_merged();
        JsonlWriter writer(kept_path);
        while (auto doc = reader->next()) {
            doc->annotations.erase(kOrdinalKey);
            writer.write(*doc);
            ++kept_count;
        }
        writer.close();
    }

    PipelineReport report;
    report.docs_in = ingest_report.docs_in;
    report.docs_out = kept_count;
    report.stages.push_back(ingest_report);
    for (const auto& stage : filter_reports) report.stages.push_back(stage);
    if (exact_report) report.stages.push_back(*exact_report);
    if (fuzzy_report) report.stages.push_back(*fuzzy_report);
    write_pipeline_report((out_dir / "report.json").string(), report);
    return report;
}

}  // namespace korpus
