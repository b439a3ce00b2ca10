#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "korpus/corpus_io.hpp"
#include "korpus/dedup.hpp"
#include "korpus/heuristic_filters.hpp"
#include "korpus/html_text.hpp"
#include "korpus/lang_id.hpp"
#include "korpus/linear_classifier.hpp"
#include "korpus/pipeline.hpp"
#include "korpus/quality_ensemble.hpp"
#include "korpus/synth_gen.hpp"
#include "korpus/url_filter.hpp"

using nlohmann::ordered_json;

namespace {

// Threshold flags set on the command line override the config file; unset
// ones keep whatever the config (or the default profile) says.
class FilterFlagBinder {
  public:
    void bind(CLI::App* app, korpus::FilterConfig& target) {
        add(app, "--dup-line-frac", &korpus::FilterConfig::dup_line_frac,
            "max duplicate-line fraction");
        add(app, "--dup-para-frac-lines", &korpus::FilterConfig::dup_para_frac_lines,
            "max fraction of lines inside duplicate paragraphs");
        add(app, "--dup-para-frac-paras", &korpus::FilterConfig::dup_para_frac_paras,
            "max duplicate-paragraph fraction");
        add(app, "--repeated-char-line-frac", &korpus::FilterConfig::repeated_char_line_frac,
            "max fraction of characters inside duplicate lines");
        add(app, "--min-words", &korpus::FilterConfig::min_words, "min word count");
        add(app, "--max-words", &korpus::FilterConfig::max_words, "max word count");
        add(app, "--max-mean-word-len", &korpus::FilterConfig::max_mean_word_len,
            "max mean word length");
        add(app, "--max-symbol-word-ratio", &korpus::FilterConfig::max_symbol_word_ratio,
            "max symbol-to-word ratio");
        add(app, "--max-bullet-line-frac", &korpus::FilterConfig::max_bullet_line_frac,
            "max bullet-line fraction");
        add(app, "--max-ellipsis-line-frac", &korpus::FilterConfig::max_ellipsis_line_frac,
            "max ellipsis-line fraction");
        add(app, "--min-alpha-word-frac", &korpus::FilterConfig::min_alpha_word_frac,
            "min alphabetic-word fraction");
        add(app, "--min-stopword-hits", &korpus::FilterConfig::min_stopword_hits,
            "min stopword occurrences");
        add(app, "--max-number-frac", &korpus::FilterConfig::max_number_frac,
            "max digit fraction");
        add(app, "--max-uppercase-line-frac", &korpus::FilterConfig::max_uppercase_line_frac,
            "max mostly-uppercase line fraction");
        add(app, "--min-avg-words-per-line", &korpus::FilterConfig::min_avg_words_per_line,
            "min average words per line");
        add(app, "--max-boilerplate-para-frac", &korpus::FilterConfig::max_boilerplate_para_frac,
            "max boilerplate-paragraph fraction");
        target_ = &target;
    }

    void apply() const {
        for (const auto& applier : appliers_) applier(*target_);
    }

  private:
    template <typename T>
    void add(CLI::App* app, const std::string& name, T korpus::FilterConfig::*member,
             const std::string& desc) {
        auto value = std::make_shared<T>();
        CLI::Option* opt = app->add_option(name, *value, desc);
        appliers_.push_back([opt, value, member](korpus::FilterConfig& cfg) {
            if (opt->count() > 0) cfg.*member = *value;
        });
    }

    korpus::FilterConfig* target_ = nullptr;
    std::vector<std::function<void(korpus::FilterConfig&)>> appliers_;
};

std::vector<korpus::LabeledText> load_labeled_jsonl(const std::string& path,
                                                    const std::string& text_field,
                                                    const std::string& label_field) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<korpus::LabeledText> out;
    std::string line;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const std::exception&) {
            throw std::runtime_error(path + ":" + std::to_string(lineno) + ": not valid JSON");
        }
        if (!j.contains(text_field) || !j.contains(label_field)) continue;
        out.push_back({j.at(text_field).get<std::string>(), j.at(label_field).get<std::string>()});
    }
    return out;
}

double prob_of_high(const korpus::LinearModel& model, const std::string& text) {
    auto scores = korpus::predict_scores(model, text);
    for (size_t i = 0; i < model.labels.size(); ++i) {
        if (model.labels[i] == "high") return scores[i];
    }
    throw std::runtime_error("classifier has no 'high' label");
}

std::string dedup_group(const std::string& scope, const korpus::Document& doc) {
    return scope == "dump" ? doc.source_tag : std::string();
}

void print_reasons(const std::map<std::string, uint64_t>& reasons) {
    for (const auto& [reason, count] : reasons) {
        std::cout << "  " << reason << ": " << count << '\n';
    }
}

int cmd_ingest(const std::string& input, const std::string& format, const std::string& output,
               const std::string& tag) {
    auto reader = korpus::open_corpus(input, korpus::parse_corpus_format(format), tag);
    korpus::JsonlWriter writer(output);
    uint64_t docs = 0;
    while (auto doc = reader->next()) {
        writer.write(*doc);
        ++docs;
    }
    writer.close();
    std::cout << "documents: " << docs << "\nmalformed: " << reader->malformed_count() << '\n';
    return 0;
}

struct FilterArgs {
    std::string input;
    std::string output;
    std::string config_path;
    std::string groups = "repetition,document,line";
    std::string report_path;
    korpus::PipelineConfig config;
    FilterFlagBinder binder;
    std::string blocked_domains, blocked_words, hq_domains;
    std::string lang_model, lang_target = "de";
    double word_threshold = 1.0;
    double lang_min_score = 0.0;
};

int cmd_filter(FilterArgs& args, const CLI::App* sub) {
    if (!args.config_path.empty()) args.config = korpus::read_pipeline_config(args.config_path);
    args.binder.apply();
    if (sub->count("--blocked-domains")) args.config.url.blocked_domains_path = args.blocked_domains;
    if (sub->count("--blocked-words")) args.config.url.blocked_words_path = args.blocked_words;
    if (sub->count("--hq-domains")) args.config.url.hq_domains_path = args.hq_domains;
    if (sub->count("--word-threshold")) args.config.url.word_threshold = args.word_threshold;
    if (sub->count("--lang-model")) args.config.lang.model_path = args.lang_model;
    if (sub->count("--lang-target")) args.config.lang.target = args.lang_target;
    if (sub->count("--lang-min-score")) args.config.lang.min_score = args.lang_min_score;

    std::set<std::string> groups;
    for (auto&& part : CLI::detail::split(args.groups, ',')) {
        if (part.empty()) continue;
        if (part == "exact_dedup" || part == "fuzzy_dedup" || !korpus::is_known_stage(part)) {
            throw CLI::ValidationError("--groups", "unknown rule group: " + part);
        }
        groups.insert(part);
    }

    auto problems = args.config.filters.validate();
    if (!problems.empty()) throw std::runtime_error("invalid thresholds: " + problems.front());

    korpus::UrlRules url_rules;
    if (groups.count("url")) {
        url_rules = korpus::load_url_rules(
            args.config.url.blocked_domains_path, args.config.url.blocked_words_path,
            args.config.url.hq_domains_path, args.config.url.word_threshold);
    }
    korpus::LangModel lang_model;
    if (groups.count("lang")) {
        if (args.config.lang.model_path.empty())
            throw std::runtime_error("--groups lang needs --lang-model or a config with lang.model");
        lang_model = korpus::load_lang_model(args.config.lang.model_path);
    }

    std::vector<korpus::StageReport> stage_reports;
    for (auto name : korpus::kStageOrder) {
        if (groups.count(std::string(name)))
            stage_reports.push_back({std::string(name), 0, 0, {}});
    }

    auto reader = korpus::open_jsonl(args.input);
    korpus::JsonlWriter writer(args.output);
    while (auto doc = reader->next()) {
        bool alive = true;
        for (auto& stage : stage_reports) {
            ++stage.docs_in;
            korpus::FilterOutcome outcome;
            if (stage.stage == "url") outcome = korpus::filter_url(*doc, url_rules);
            else if (stage.stage == "extract") {
                if (doc->raw_html) {
                    doc->text = korpus::html_to_text(*doc->raw_html);
                    doc->raw_html.reset();
                }
            } else if (stage.stage == "lang")
                outcome = korpus::filter_language(*doc, lang_model, args.config.lang.target,
                                                  args.config.lang.min_score);
            else if (stage.stage == "repetition")
                outcome = korpus::repetition_filter(*doc, args.config.filters);
            else if (stage.stage == "document")
                outcome = korpus::document_filter(*doc, args.config.filters);
            else if (stage.stage == "line")
                outcome = korpus::line_filter(*doc, args.config.filters);
            if (!outcome.keep) {
                ++stage.reasons[outcome.reason];
                alive = false;
                break;
            }
            ++stage.docs_out;
        }
        if (alive) writer.write(*doc);
    }
    writer.close();

    for (const auto& stage : stage_reports) {
        std::cout << stage.stage << ": " << stage.docs_in << " -> " << stage.docs_out << '\n';
        print_reasons(stage.reasons);
    }
    if (!args.report_path.empty()) {
        ordered_json j = ordered_json::object();
        j["stages"] = ordered_json::array();
        for (const auto& stage : stage_reports) {
            ordered_json row = {{"stage", stage.stage},
                                {"docs_in", stage.docs_in},
                                {"docs_out", stage.docs_out},
                                {"reasons", ordered_json::object()}};
            for (const auto& [reason, count] : stage.reasons) row["reasons"][reason] = count;
            j["stages"].push_back(row);
        }
        std::ofstream out(args.report_path);
        out << j.dump(2) << '\n';
    }
    return 0;
}

int cmd_dedup_exact(const std::string& input, const std::string& output,
                    const std::string& scope) {
    auto reader = korpus::open_jsonl(input);
    korpus::JsonlWriter writer(output);
    std::map<std::string, korpus::ExactDeduper> dedupers;
    uint64_t kept = 0, dropped = 0;
    while (auto doc = reader->next()) {
        if (dedupers[dedup_group(scope, *doc)].admit(*doc)) {
            writer.write(*doc);
            ++kept;
        } else {
            ++dropped;
        }
    }
    writer.close();
    std::cout << "kept: " << kept << "\nexact duplicates: " << dropped << '\n';
    return 0;
}

struct FuzzyArgs {
    std::string input, output, scope = "global";
    uint64_t seed = korpus::kDefaultMinHashSeed;
    size_t max_bucket = korpus::kDefaultMaxBucket;
    double verify_jaccard = 0.0;
    std::string signatures_path, edges_path, removals_path;
};

int cmd_dedup_fuzzy(const FuzzyArgs& args) {
    const auto seeds = korpus::minhash_seeds(args.seed);
    std::map<std::string, std::vector<korpus::MinHashSignature>> groups;
    {
        auto reader = korpus::open_jsonl(args.input);
        while (auto doc = reader->next()) {
            groups[dedup_group(args.scope, *doc)].push_back(
                korpus::minhash(doc->id, doc->text, seeds));
        }
    }
    std::vector<korpus::MinHashSignature> all_signatures;
    std::vector<korpus::Edge> all_edges;
    std::set<std::string> removals;
    for (const auto& [tag, signatures] : groups) {
        auto lsh = korpus::lsh_candidates(signatures, args.max_bucket, args.verify_jaccard);
        auto graph = korpus::connected_components(std::move(lsh.edges));
        for (const auto& id : korpus::removal_list(graph)) removals.insert(id);
        all_edges.insert(all_edges.end(), graph.edges.begin(), graph.edges.end());
        all_signatures.insert(all_signatures.end(), signatures.begin(), signatures.end());
    }
    if (!args.signatures_path.empty()) korpus::write_signatures(args.signatures_path, all_signatures);
    if (!args.edges_path.empty()) korpus::write_edges(args.edges_path, all_edges);
    if (!args.removals_path.empty())
        korpus::write_removal_list(args.removals_path, {removals.begin(), removals.end()});

    auto reader = korpus::open_jsonl(args.input);
    korpus::JsonlWriter writer(args.output);
    uint64_t kept = 0;
    while (auto doc = reader->next()) {
        if (removals.count(doc->id)) continue;
        writer.write(*doc);
        ++kept;
    }
    writer.close();
    std::cout << "kept: " << kept << "\nfuzzy duplicates: " << removals.size()
              << "\ncandidate edges: " << all_edges.size() << '\n';
    return 0;
}

int cmd_train_langid(const std::string& labeled, const std::string& output, int ngram_min,
                     int ngram_max, double smoothing, uint32_t bucket_bits,
                     const std::string& text_field, const std::string& label_field) {
    auto corpus = load_labeled_jsonl(labeled, text_field, label_field);
    auto model = korpus::train_lang_model(corpus, ngram_min, ngram_max, smoothing, bucket_bits);
    korpus::save_lang_model(model, output);
    std::cout << "documents: " << corpus.size() << "\nlanguages:";
    for (const auto& lang : model.languages) std::cout << ' ' << lang;
    std::cout << '\n';
    return 0;
}

int cmd_train_classifier(const std::string& labeled, const std::string& output,
                         const korpus::TrainOptions& options, const std::string& text_field,
                         const std::string& label_field) {
    auto corpus = load_labeled_jsonl(labeled, text_field, label_field);
    auto result = korpus::train_classifier(corpus, options);
    korpus::save_linear_model(result.model, output);
    std::cout << "documents: " << corpus.size()
              << "\nvalidation accuracy: " << result.validation_accuracy << '\n';
    for (const auto& [label, pr] : result.validation) {
        std::cout << label << ": precision " << pr.precision << ", recall " << pr.recall << '\n';
    }
    return 0;
}

struct ScoreArgs {
    std::string input, output;
    std::string external_path;
    std::string edu_ft_path, grammar_ft_path, instr_ft_path;
    std::string thresholds_path;
    bool compute_thresholds = false;
    double percentile = 0.85;
};

int cmd_score(const ScoreArgs& args) {
    korpus::ExternalScores external;
    if (!args.external_path.empty()) external = korpus::load_external_scores(args.external_path);

    std::optional<korpus::LinearModel> edu_ft, grammar_ft, instr_ft;
    if (!args.edu_ft_path.empty()) edu_ft = korpus::load_linear_model(args.edu_ft_path);
    if (!args.grammar_ft_path.empty())
        grammar_ft = korpus::load_linear_model(args.grammar_ft_path);
    if (!args.instr_ft_path.empty()) instr_ft = korpus::load_linear_model(args.instr_ft_path);

    std::vector<korpus::QualityScorecard> cards;
    {
        auto reader = korpus::open_jsonl(args.input);
        while (auto doc = reader->next()) {
            korpus::QualityScorecard card;
            card.doc_id = doc->id;
            auto it = external.by_doc.find(doc->id);
            if (it != external.by_doc.end()) {
                card.edu_bert_score = it->second.edu_bert_score;
                card.grammar_bert_label = it->second.grammar_bert_label;
                card.instr_bert_prob = it->second.instr_bert_prob;
            }
            if (edu_ft) card.edu_ft_conf = prob_of_high(*edu_ft, doc->text);
            if (grammar_ft) card.grammar_ft_conf = prob_of_high(*grammar_ft, doc->text);
            if (instr_ft) card.instr_ft_prob = prob_of_high(*instr_ft, doc->text);
            cards.push_back(std::move(card));
        }
    }

    korpus::QualityThresholds thresholds;
    if (args.compute_thresholds) {
        std::vector<double> bert_probs, ft_probs;
        for (const auto& card : cards) {
            if (card.instr_bert_prob) bert_probs.push_back(*card.instr_bert_prob);
            if (card.instr_ft_prob) ft_probs.push_back(*card.instr_ft_prob);
        }
        thresholds.percentile = args.percentile;
        thresholds.sample_count = std::max(bert_probs.size(), ft_probs.size());
        if (!bert_probs.empty())
            thresholds.instr_bert = korpus::instr_percentile_threshold(bert_probs, args.percentile);
        if (!ft_probs.empty())
            thresholds.instr_ft = korpus::instr_percentile_threshold(ft_probs, args.percentile);
        if (args.thresholds_path.empty())
            throw std::runtime_error("--compute-thresholds needs --thresholds to store the result");
        korpus::write_thresholds(args.thresholds_path, thresholds);
    } else if (!args.thresholds_path.empty()) {
        thresholds = korpus::read_thresholds(args.thresholds_path);
    }

    std::map<std::string, uint64_t> histogram;
    for (auto& card : cards) {
        korpus::finalize_scorecard(card, thresholds);
        ++histogram[card.bucket];
    }
    korpus::write_scorecards(args.output, cards);
    std::cout << "scored: " << cards.size() << "\nrejected external rows: " << external.rejected
              << '\n';
    for (const auto& [bucket, count] : histogram) {
        std::cout << bucket << ": " << count << '\n';
    }
    return 0;
}

int cmd_bucket(const std::string& input, const std::string& output,
               const std::string& thresholds_path) {
    auto cards = korpus::read_scorecards(input);
    std::map<std::string, uint64_t> histogram;
    for (auto& card : cards) {
        if (!thresholds_path.empty()) {
            card.overall_points = korpus::overall_points(card, korpus::read_thresholds(thresholds_path));
        }
        card.bucket = korpus::bucketize(card.overall_points);
        ++histogram[card.bucket];
    }
    if (!output.empty()) korpus::write_scorecards(output, cards);
    for (const auto& [bucket, count] : histogram) {
        std::cout << bucket << ": " << count << '\n';
    }
    return 0;
}

struct SynthArgs {
    std::string input, output, dead_letter_path;
    std::string endpoint, model = "default";
    std::string templates = "all";
    size_t max_chars = 8000;
    size_t concurrency = 16;
    int max_attempts = 3;
    int backoff_ms = 200;
    double temperature = 0.7, top_p = 0.9;
    int max_tokens = 2048;
    uint64_t sample_seed = 42;
};

int cmd_synth(const SynthArgs& args) {
    korpus::SynthOptions options;
    options.templates = korpus::builtin_templates();
    options.max_chars = args.max_chars;
    options.concurrency = args.concurrency;
    options.retry.max_attempts = args.max_attempts;
    options.retry.initial_backoff_ms = args.backoff_ms;
    options.model_tag = args.model;
    options.temperature = args.temperature;
    options.top_p = args.top_p;
    options.max_tokens = args.max_tokens;
    options.sample_seed = args.sample_seed;
    if (args.templates.rfind("sample:", 0) == 0) {
        options.sample_k = std::stoul(args.templates.substr(7));
        if (options.sample_k == 0 || options.sample_k > options.templates.size())
            throw CLI::ValidationError("--templates", "sample size out of range");
    } else if (args.templates != "all") {
        throw CLI::ValidationError("--templates", "expected all or sample:<k>");
    }

    std::vector<korpus::Document> docs;
    {
        auto reader = korpus::open_jsonl(args.input);
        while (auto doc = reader->next()) docs.push_back(std::move(*doc));
    }

    korpus::HttpChatClient client(args.endpoint, args.model);
    auto result = korpus::generate(docs, client, options);
    korpus::write_synth_records(args.output, result.records);
    if (!args.dead_letter_path.empty())
        korpus::write_dead_letters(args.dead_letter_path, result.dead_letters);

    std::cout << "records: " << result.records.size()
              << "\ndead letters: " << result.dead_letters.size()
              << "\nretries: " << result.retries << "\ndropped empty: " << result.dropped_empty
              << "\ndropped echo: " << result.dropped_echo << '\n';
    return 0;
}

int cmd_judge_annotate(const std::string& input, const std::string& prompts_out,
                       const std::string& responses, const std::string& verdicts_out) {
    if (!prompts_out.empty()) {
        auto reader = korpus::open_jsonl(input);
        std::ofstream out(prompts_out);
        if (!out) throw std::runtime_error("cannot write " + prompts_out);
        uint64_t n = 0;
        while (auto doc = reader->next()) {
            auto prompt = korpus::build_judge_prompt_parts(*doc);
            ordered_json j = {{"doc_id", doc->id},
                              {"system", prompt.system},
                              {"user", prompt.user},
                              {"assistant_primer", prompt.assistant_primer}};
            out << j.dump() << '\n';
            ++n;
        }
        std::cout << "prompts: " << n << '\n';
        return 0;
    }

    std::ifstream in(responses);
    if (!in) throw std::runtime_error("cannot open: " + responses);
    std::ofstream out(verdicts_out);
    if (!out) throw std::runtime_error("cannot write " + verdicts_out);
    uint64_t parsed = 0, rejected = 0;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto j = ordered_json::parse(line);
        std::string error;
        auto verdict =
            korpus::parse_judge_response(j.at("response").get<std::string>(), &error);
        if (!verdict) {
            ++rejected;
            continue;
        }
        ordered_json row = {{"doc_id", j.at("doc_id")},
                            {"content_grade", verdict->content_grade},
                            {"language_grade", verdict->language_grade},
                            {"orthography_grade", verdict->orthography_grade},
                            {"edu_score", korpus::edu_score(*verdict)}};
        out << row.dump() << '\n';
        ++parsed;
    }
    std::cout << "parsed: " << parsed << "\nrejected: " << rejected << '\n';
    return 0;
}

int cmd_stats(const std::string& report_path) {
    auto report = korpus::read_pipeline_report(report_path);
    std::cout << report.summary();
    return 0;
}

int cmd_validate_config(const std::string& config_path) {
    auto config = korpus::read_pipeline_config(config_path);
    auto problems = config.validate();
    if (problems.empty()) {
        std::cout << "config ok\n";
        return 0;
    }
    for (const auto& problem : problems) std::cerr << "problem: " << problem << '\n';
    return 1;
}

int cmd_init_config(const std::string& output) {
    korpus::PipelineConfig config;
    if (output.empty()) {
        std::cout << config.to_json().dump(2) << '\n';
    } else {
        korpus::write_pipeline_config(output, config);
        std::cout << "wrote " << output << '\n';
    }
    return 0;
}

struct RunArgs {
    std::string config_path;
    korpus::PipelineConfig config;
    FilterFlagBinder binder;
    std::string input, format, output_dir, scope, lang_model;
    int shards = 1;
    uint64_t seed = 42;
    bool resume = false;
    std::vector<std::string> disable, enable;
};

int cmd_run(RunArgs& args, const CLI::App* sub) {
    if (!args.config_path.empty()) args.config = korpus::read_pipeline_config(args.config_path);
    args.binder.apply();
    if (sub->count("--input")) args.config.input = args.input;
    if (sub->count("--format")) args.config.input_format = args.format;
    if (sub->count("--output-dir")) args.config.output_dir = args.output_dir;
    if (sub->count("--shards")) args.config.shards = args.shards;
    if (sub->count("--seed")) args.config.seed = args.seed;
    if (sub->count("--dedup-scope")) args.config.dedup_scope = args.scope;
    if (sub->count("--lang-model")) args.config.lang.model_path = args.lang_model;
    if (args.resume) args.config.resume = true;
    for (const auto& name : args.disable) args.config.stages[name] = false;
    for (const auto& name : args.enable) args.config.stages[name] = true;

    auto report = korpus::run_pipeline(args.config);
    std::cout << report.summary();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"German web-corpus curation toolkit"};
    app.require_subcommand(1);
    int rc = 0;

    // ingest
    auto* ingest = app.add_subcommand("ingest", "normalize a corpus into canonical JSONL");
    std::string in_input, in_format = "jsonl", in_output, in_tag;
    ingest->add_option("--input", in_input, "file or directory")->required();
    ingest->add_option("--format", in_format, "jsonl or wet");
    ingest->add_option("--output", in_output, "output JSONL path")->required();
    ingest->add_option("--source-tag", in_tag, "tag recorded on every document");
    ingest->callback([&] { rc = cmd_ingest(in_input, in_format, in_output, in_tag); });

    // filter
    auto* filter = app.add_subcommand("filter", "apply per-document rule groups");
    auto filter_args = std::make_shared<FilterArgs>();
    filter->add_option("--input", filter_args->input, "input JSONL")->required();
    filter->add_option("--output", filter_args->output, "output JSONL")->required();
    filter->add_option("--config", filter_args->config_path, "pipeline config JSON");
    filter->add_option("--groups", filter_args->groups,
                       "comma list of url,extract,lang,repetition,document,line");
    filter->add_option("--report", filter_args->report_path, "write stage stats JSON here");
    filter->add_option("--blocked-domains", filter_args->blocked_domains, "domain list file");
    filter->add_option("--blocked-words", filter_args->blocked_words, "word:weight list file");
    filter->add_option("--hq-domains", filter_args->hq_domains, "curated domain list file");
    filter->add_option("--word-threshold", filter_args->word_threshold, "URL word score cutoff");
    filter->add_option("--lang-model", filter_args->lang_model, "language id model");
    filter->add_option("--lang-target", filter_args->lang_target, "language to keep");
    filter->add_option("--lang-min-score", filter_args->lang_min_score, "confidence cutoff");
    filter_args->binder.bind(filter, filter_args->config.filters);
    filter->callback([&, filter_args] { rc = cmd_filter(*filter_args, filter); });

    // dedup
    auto* dedup = app.add_subcommand("dedup", "remove exact or fuzzy duplicates");
    dedup->require_subcommand(1);
    auto* dexact = dedup->add_subcommand("exact", "drop byte-identical texts (first wins)");
    std::string de_input, de_output, de_scope = "global";
    dexact->add_option("--input", de_input, "input JSONL")->required();
    dexact->add_option("--output", de_output, "output JSONL")->required();
    dexact->add_option("--scope", de_scope, "global or dump");
    dexact->callback([&] { rc = cmd_dedup_exact(de_input, de_output, de_scope); });

    auto* dfuzzy = dedup->add_subcommand("fuzzy", "MinHash/LSH near-duplicate removal");
    auto fuzzy_args = std::make_shared<FuzzyArgs>();
    dfuzzy->add_option("--input", fuzzy_args->input, "input JSONL")->required();
    dfuzzy->add_option("--output", fuzzy_args->output, "output JSONL")->required();
    dfuzzy->add_option("--scope", fuzzy_args->scope, "global or dump");
    dfuzzy->add_option("--seed", fuzzy_args->seed, "MinHash seed");
    dfuzzy->add_option("--max-bucket", fuzzy_args->max_bucket, "LSH bucket cap");
    dfuzzy->add_option("--verify-jaccard", fuzzy_args->verify_jaccard,
                       "min signature agreement for an edge");
    dfuzzy->add_option("--signatures", fuzzy_args->signatures_path, "write signatures here");
    dfuzzy->add_option("--edges", fuzzy_args->edges_path, "write candidate edges here");
    dfuzzy->add_option("--removals", fuzzy_args->removals_path, "write removed ids here");
    dfuzzy->callback([&, fuzzy_args] { rc = cmd_dedup_fuzzy(*fuzzy_args); });

    // train-langid
    auto* tlang = app.add_subcommand("train-langid", "train the language identifier");
    std::string tl_labeled, tl_output, tl_text = "text", tl_label = "language";
    int tl_min = 1, tl_max = 5;
    double tl_k = 0.5;
    uint32_t tl_bits = 20;
    tlang->add_option("--labeled", tl_labeled, "JSONL with text and language fields")->required();
    tlang->add_option("--output", tl_output, "model path")->required();
    tlang->add_option("--ngram-min", tl_min, "smallest n-gram");
    tlang->add_option("--ngram-max", tl_max, "largest n-gram");
    tlang->add_option("--smoothing", tl_k, "additive smoothing");
    tlang->add_option("--bucket-bits", tl_bits, "hash bucket bits");
    tlang->add_option("--text-field", tl_text, "JSON field holding the text");
    tlang->add_option("--label-field", tl_label, "JSON field holding the language");
    tlang->callback([&] {
        rc = cmd_train_langid(tl_labeled, tl_output, tl_min, tl_max, tl_k, tl_bits, tl_text,
                              tl_label);
    });

    // train-classifier
    auto* tclf = app.add_subcommand("train-classifier", "train a quality classifier");
    std::string tc_labeled, tc_output, tc_text = "text", tc_label = "label";
    korpus::TrainOptions tc_options;
    tclf->add_option("--labeled", tc_labeled, "JSONL with text and label fields")->required();
    tclf->add_option("--output", tc_output, "model path")->required();
    tclf->add_option("--epochs", tc_options.epochs, "training epochs");
    tclf->add_option("--learning-rate", tc_options.learning_rate, "initial learning rate");
    tclf->add_option("--val-fraction", tc_options.val_fraction, "validation split");
    tclf->add_option("--seed", tc_options.seed, "shuffle seed");
    tclf->add_option("--bucket-bits", tc_options.bucket_bits, "hash bucket bits");
    tclf->add_flag("!--no-balance", tc_options.balance, "keep class imbalance");
    tclf->add_option("--text-field", tc_text, "JSON field holding the text");
    tclf->add_option("--label-field", tc_label, "JSON field holding the label");
    tclf->callback(
        [&] { rc = cmd_train_classifier(tc_labeled, tc_output, tc_options, tc_text, tc_label); });

    // score
    auto* score = app.add_subcommand("score", "combine quality signals into scorecards");
    auto score_args = std::make_shared<ScoreArgs>();
    score->add_option("--input", score_args->input, "documents JSONL")->required();
    score->add_option("--output", score_args->output, "scorecards JSONL")->required();
    score->add_option("--external", score_args->external_path,
                      "JSONL with edu_bert_score, grammar_bert_label, instr_bert_prob");
    score->add_option("--edu-ft", score_args->edu_ft_path, "educational classifier model");
    score->add_option("--grammar-ft", score_args->grammar_ft_path, "grammar classifier model");
    score->add_option("--instr-ft", score_args->instr_ft_path, "instruction classifier model");
    score->add_option("--thresholds", score_args->thresholds_path, "thresholds JSON");
    score->add_flag("--compute-thresholds", score_args->compute_thresholds,
                    "derive instruction cutoffs from this corpus");
    score->add_option("--percentile", score_args->percentile, "instruction percentile");
    score->callback([&, score_args] { rc = cmd_score(*score_args); });

    // bucket
    auto* bucket = app.add_subcommand("bucket", "assign quality buckets from points");
    std::string bu_input, bu_output, bu_thresholds;
    bucket->add_option("--input", bu_input, "scorecards JSONL")->required();
    bucket->add_option("--output", bu_output, "rewritten scorecards JSONL");
    bucket->add_option("--thresholds", bu_thresholds, "recompute points with these thresholds");
    bucket->callback([&] { rc = cmd_bucket(bu_input, bu_output, bu_thresholds); });

    // synth
    auto* synth = app.add_subcommand("synth", "generate synthetic variants via a chat endpoint");
    auto synth_args = std::make_shared<SynthArgs>();
    synth->add_option("--input", synth_args->input, "documents JSONL")->required();
    synth->add_option("--output", synth_args->output, "records JSONL")->required();
    synth->add_option("--endpoint", synth_args->endpoint, "chat-completion base URL")->required();
    synth->add_option("--model", synth_args->model, "model tag sent with each request");
    synth->add_option("--templates", synth_args->templates, "all or sample:<k>");
    synth->add_option("--max-chars", synth_args->max_chars, "chunk size limit");
    synth->add_option("--concurrency", synth_args->concurrency, "in-flight request cap");
    synth->add_option("--max-attempts", synth_args->max_attempts, "tries per request");
    synth->add_option("--backoff-ms", synth_args->backoff_ms, "initial retry backoff");
    synth->add_option("--temperature", synth_args->temperature, "sampling temperature");
    synth->add_option("--top-p", synth_args->top_p, "nucleus sampling mass");
    synth->add_option("--max-tokens", synth_args->max_tokens, "response token cap");
    synth->add_option("--sample-seed", synth_args->sample_seed, "per-document template sampling");
    synth->add_option("--dead-letter", synth_args->dead_letter_path, "failed request JSONL");
    synth->callback([&, synth_args] { rc = cmd_synth(*synth_args); });

    // judge-annotate
    auto* judge = app.add_subcommand("judge-annotate",
                                     "build judge prompts or parse judge responses");
    std::string ju_input, ju_prompts, ju_responses, ju_verdicts;
    judge->add_option("--input", ju_input, "documents JSONL (prompt building)");
    judge->add_option("--prompts-out", ju_prompts, "write prompts JSONL here");
    judge->add_option("--responses", ju_responses, "JSONL with doc_id and response");
    judge->add_option("--verdicts-out", ju_verdicts, "write parsed verdicts here");
    judge->callback([&] {
        const bool build = !ju_prompts.empty();
        const bool parse = !ju_verdicts.empty();
        if (build == parse)
            throw CLI::ValidationError(
                "judge-annotate",
                "use either --input/--prompts-out or --responses/--verdicts-out");
        if (build && ju_input.empty())
            throw CLI::ValidationError("judge-annotate", "--prompts-out needs --input");
        if (parse && ju_responses.empty())
            throw CLI::ValidationError("judge-annotate", "--verdicts-out needs --responses");
        rc = cmd_judge_annotate(ju_input, ju_prompts, ju_responses, ju_verdicts);
    });

    // stats
    auto* stats = app.add_subcommand("stats", "print a pipeline report as a table");
    std::string st_report;
    stats->add_option("--report", st_report, "report JSON")->required();
    stats->callback([&] { rc = cmd_stats(st_report); });

    // validate-config
    auto* vconfig = app.add_subcommand("validate-config", "check a pipeline config");
    std::string vc_path;
    vconfig->add_option("--config", vc_path, "config JSON")->required();
    vconfig->callback([&] { rc = cmd_validate_config(vc_path); });

    // init-config
    auto* iconfig = app.add_subcommand("init-config", "emit the default pipeline config");
    std::string ic_output;
    iconfig->add_option("--output", ic_output, "write here instead of stdout");
    iconfig->callback([&] { rc = cmd_init_config(ic_output); });

    // run
    auto* run = app.add_subcommand("run", "run the full curation pipeline");
    auto run_args = std::make_shared<RunArgs>();
    run->add_option("--config", run_args->config_path, "pipeline config JSON");
    run->add_option("--input", run_args->input, "input file or directory");
    run->add_option("--format", run_args->format, "jsonl or wet");
    run->add_option("--output-dir", run_args->output_dir, "artifact directory");
    run->add_option("--shards", run_args->shards, "map-phase worker count");
    run->add_option("--seed", run_args->seed, "pipeline seed");
    run->add_option("--dedup-scope", run_args->scope, "global or dump");
    run->add_option("--lang-model", run_args->lang_model, "language id model");
    run->add_flag("--resume", run_args->resume, "reuse completed artifacts");
    run->add_option("--disable", run_args->disable, "stage to turn off")
        ->allow_extra_args(false);
    run->add_option("--enable", run_args->enable, "stage to turn on")->allow_extra_args(false);
    run_args->binder.bind(run, run_args->config.filters);
    run->callback([&, run_args] { rc = cmd_run(*run_args, run); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return rc;
}
