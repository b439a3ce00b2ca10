#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "korpus/corpus_io.hpp"
#include "korpus/lang_id.hpp"
#include "korpus/pipeline.hpp"
#include "support/fixtures.hpp"
#include "support/tempdir.hpp"

using namespace korpus;
namespace fs = std::filesystem;

namespace {

// Fixture corpus on disk plus a runnable config pointing at it.
struct PipelineSetup {
    test::TempDir dir;
    test::PipelineFixture fixture;
    PipelineConfig config;

    explicit PipelineSetup(size_t blocks, uint64_t seed = 5) {
        fixture = test::pipeline_corpus(blocks, seed);
        JsonlWriter writer(dir.file("input.jsonl"));
        for (const auto& doc : fixture.docs) writer.write(doc);
        writer.close();

        auto model = train_lang_model(test::toy_bilingual_corpus(), 1, 3, 0.5, 16);
        save_lang_model(model, dir.file("lang.bin").string());
        dir.write_file("blocked_domains.txt", "spamnetz.de\n");

        config.input = dir.file("input.jsonl").string();
        config.output_dir = dir.file("out").string();
        config.lang.model_path = dir.file("lang.bin").string();
        config.url.blocked_domains_path = dir.file("blocked_domains.txt").string();
    }
};

std::vector<Document> read_docs(const fs::path& path) {
    std::vector<Document> docs;
    auto reader = open_jsonl(path);
    while (auto doc = reader->next()) docs.push_back(std::move(*doc));
    return docs;
}

std::set<std::string> id_set(const std::vector<Document>& docs) {
    std::set<std::string> ids;
    for (const auto& doc : docs) ids.insert(doc.id);
    return ids;
}

const StageReport& stage_row(const PipelineReport& report, const std::string& name) {
    for (const auto& stage : report.stages) {
        if (stage.stage == name) return stage;
    }
    throw std::runtime_error("no stage row: " + name);
}

}  // namespace

TEST_CASE("pipeline config round-trips through JSON") {
    PipelineConfig config;
    config.input = "in.jsonl";
    config.output_dir = "out";
    config.shards = 3;
    config.dedup_scope = "dump";
    config.stages["lang"] = false;
    config.url.blocked_domains_path = "domains.txt";
    config.lang.target = "en";
    config.fuzzy.minhash_seed = 7;
    config.filters.min_words = 40;

    auto restored = PipelineConfig::from_json(config.to_json());
    CHECK(restored.input == "in.jsonl");
    CHECK(restored.shards == 3);
    CHECK(restored.dedup_scope == "dump");
    CHECK(!restored.stage_enabled("lang"));
    CHECK(restored.stage_enabled("url"));
    CHECK(restored.url.blocked_domains_path == "domains.txt");
    CHECK(restored.lang.target == "en");
    CHECK(restored.fuzzy.minhash_seed == 7);
    CHECK(restored.filters.min_words == 40);

    test::TempDir dir;
    auto path = dir.file("config.json");
    write_pipeline_config(path.string(), config);
    auto loaded = read_pipeline_config(path.string());
    CHECK(loaded.to_json() == config.to_json());
}

TEST_CASE("pipeline config validation") {
    PipelineConfig config;
    config.stages["lang"] = false;
    CHECK(config.validate().empty());

    SUBCASE("filter thresholds are range-checked") {
        config.filters.dup_line_frac = 1.5;
        auto problems = config.validate();
        CHECK(!problems.empty());
    }
    SUBCASE("shards and scope") {
        config.shards = 0;
        CHECK(!config.validate().empty());
        config.shards = 2;
        config.dedup_scope = "weekly";
        CHECK(!config.validate().empty());
    }
    SUBCASE("lang stage needs a model path") {
        config.stages["lang"] = true;
        CHECK(!config.validate().empty());
        config.lang.model_path = "model.bin";
        CHECK(config.validate().empty());
    }
    SUBCASE("unknown stages are rejected") {
        config.stages["sentiment"] = true;
        CHECK(!config.validate().empty());
    }
    SUBCASE("reordering needs the override flag") {
        std::swap(config.stage_order[3], config.stage_order[4]);  // repetition <-> document
        CHECK(!config.validate().empty());
        config.allow_reorder = true;
        CHECK(config.validate().empty());
    }
    SUBCASE("dedup stages stay last even when reordering") {
        config.allow_reorder = true;
        std::swap(config.stage_order[0], config.stage_order[7]);  // url <-> fuzzy_dedup
        CHECK(!config.validate().empty());
    }
    SUBCASE("stage_order must be complete and unique") {
        config.stage_order.pop_back();
        CHECK(!config.validate().empty());
        config.stage_order = {"url", "url", "extract", "lang", "repetition",
                              "document", "line", "exact_dedup"};
        CHECK(!config.validate().empty());
    }
}

TEST_CASE("full pipeline filters, dedups and reports") {
    PipelineSetup setup(10);
    auto report = run_pipeline(setup.config);

    const fs::path out = setup.config.output_dir;
    REQUIRE(fs::exists(out / "kept.jsonl"));
    REQUIRE(fs::exists(out / "report.json"));

    CHECK(report.docs_in == 120);
    CHECK(stage_row(report, "ingest").docs_out == 120);
    CHECK(stage_row(report, "url").reasons.at("blocked-domain") == 10);
    CHECK(stage_row(report, "lang").reasons.at("lang") == 10);
    CHECK(stage_row(report, "repetition").reasons.at("dup_line_frac") == 10);
    CHECK(stage_row(report, "document").reasons.at("stopword_hits") == 10);
    CHECK(stage_row(report, "line").reasons.empty());
    CHECK(stage_row(report, "exact_dedup").reasons.at("exact-duplicate") == 10);
    CHECK(stage_row(report, "fuzzy_dedup").reasons.at("fuzzy-duplicate") == 10);

    // stage chaining: every stage consumes exactly what the previous one kept
    for (size_t i = 1; i < report.stages.size(); ++i) {
        CHECK(report.stages[i].docs_in == report.stages[i - 1].docs_out);
        CHECK(report.stages[i].docs_out <= report.stages[i].docs_in);
    }

    auto kept = read_docs(out / "kept.jsonl");
    auto ids = id_set(kept);
    CHECK(kept.size() == 60);
    CHECK(report.docs_out == kept.size());
    for (const auto& id : setup.fixture.good_ids) CHECK(ids.count(id) == 1);
    for (const auto& id : setup.fixture.foreign_ids) CHECK(ids.count(id) == 0);
    for (const auto& id : setup.fixture.stopfree_ids) CHECK(ids.count(id) == 0);
    for (const auto& id : setup.fixture.repetitive_ids) CHECK(ids.count(id) == 0);
    for (const auto& id : setup.fixture.url_blocked_ids) CHECK(ids.count(id) == 0);
    for (const auto& id : setup.fixture.exact_dup_ids) CHECK(ids.count(id) == 0);
    for (const auto& id : setup.fixture.near_dup_ids) CHECK(ids.count(id) == 0);

    // survivors come out in input order, annotated where stages added facts
    CHECK(std::is_sorted(kept.begin(), kept.end(),
                         [](const Document& a, const Document& b) { return a.id < b.id; }));
    size_t no_url = 0;
    for (const auto& doc : kept) {
        CHECK(!doc.annotations.contains("__ordinal"));
        if (!doc.url) {
            ++no_url;
            CHECK(doc.annotations.at("url_filter") == "no-url");
        }
        CHECK(doc.language == "de");
    }
    CHECK(no_url == 10);

    auto reloaded = read_pipeline_report((out / "report.json").string());
    CHECK(reloaded.to_json() == report.to_json());
    CHECK(report.summary().find("exact_dedup") != std::string::npos);
}

TEST_CASE("disabling every stage reproduces the input") {
    PipelineSetup setup(3);
    for (auto& [name, enabled] : setup.config.stages) enabled = false;
    setup.config.lang.model_path.clear();

    auto report = run_pipeline(setup.config);
    CHECK(report.docs_in == setup.fixture.docs.size());
    CHECK(report.docs_out == setup.fixture.docs.size());
    CHECK(report.stages.size() == 1);  // ingest only

    auto kept = read_docs(fs::path(setup.config.output_dir) / "kept.jsonl");
    REQUIRE(kept.size() == setup.fixture.docs.size());
    for (size_t i = 0; i < kept.size(); ++i) CHECK(kept[i] == setup.fixture.docs[i]);
}

TEST_CASE("shard count does not change the output") {
    PipelineSetup setup(6);
    setup.config.output_dir = setup.dir.file("out1").string();
    setup.config.shards = 1;
    auto report1 = run_pipeline(setup.config);

    setup.config.output_dir = setup.dir.file("out4").string();
    setup.config.shards = 4;
    auto report4 = run_pipeline(setup.config);

    auto kept1 = test::read_file(setup.dir.file("out1/kept.jsonl"));
    auto kept4 = test::read_file(setup.dir.file("out4/kept.jsonl"));
    CHECK(kept1 == kept4);
    CHECK(!kept1.empty());
    CHECK(report1.to_json() == report4.to_json());
}

TEST_CASE("rerunning with the same config is byte-identical") {
    PipelineSetup setup(4);
    setup.config.output_dir = setup.dir.file("outA").string();
    run_pipeline(setup.config);
    setup.config.output_dir = setup.dir.file("outB").string();
    run_pipeline(setup.config);

    CHECK(test::read_file(setup.dir.file("outA/kept.jsonl")) ==
          test::read_file(setup.dir.file("outB/kept.jsonl")));
    CHECK(test::read_file(setup.dir.file("outA/report.json")) ==
          test::read_file(setup.dir.file("outB/report.json")));
}

TEST_CASE("dedup scope dump keeps cross-dump copies that global removes") {
    test::TempDir dir;
    std::vector<Document> docs(4);
    const std::string shared = "ein text der in zwei crawls identisch auftaucht";
    for (size_t i = 0; i < docs.size(); ++i) {
        docs[i].id = "d" + std::to_string(i);
        docs[i].source_tag = i < 2 ? "dump-a" : "dump-b";
        docs[i].text = i % 2 ? ("einzigartiger inhalt nummer " + std::to_string(i)) : shared;
    }
    JsonlWriter writer(dir.file("in.jsonl"));
    for (const auto& doc : docs) writer.write(doc);
    writer.close();

    PipelineConfig config;
    for (auto& [name, enabled] : config.stages) enabled = false;
    config.stages["exact_dedup"] = true;
    config.input = dir.file("in.jsonl").string();

    config.output_dir = dir.file("global").string();
    config.dedup_scope = "global";
    auto global_report = run_pipeline(config);
    CHECK(global_report.docs_out == 3);  // d2 is an exact copy of d0

    config.output_dir = dir.file("dump").string();
    config.dedup_scope = "dump";
    auto dump_report = run_pipeline(config);
    CHECK(dump_report.docs_out == 4);  // copies live in different dumps
}

TEST_CASE("resume reuses completed artifacts and rejects config changes") {
    PipelineSetup setup(4);
    auto report = run_pipeline(setup.config);
    const fs::path out = setup.config.output_dir;
    auto kept_before = test::read_file(out / "kept.jsonl");
    auto report_before = test::read_file(out / "report.json");

    // the input is gone, but every phase artifact is complete
    std::ofstream(setup.config.input, std::ios::trunc) << "no longer json\n";
    setup.config.resume = true;
    auto resumed = run_pipeline(setup.config);
    CHECK(resumed.to_json() == report.to_json());
    CHECK(test::read_file(out / "kept.jsonl") == kept_before);
    CHECK(test::read_file(out / "report.json") == report_before);

    // a crash mid-phase leaves no stats file; the phase is recomputed
    fs::remove(out / "work" / "fuzzy.stats.json");
    fs::remove(out / "work" / "fuzzy.jsonl");
    auto recovered = run_pipeline(setup.config);
    CHECK(recovered.to_json() == report.to_json());
    CHECK(test::read_file(out / "kept.jsonl") == kept_before);

    // resuming under a different config must not mix artifacts
    setup.config.shards = 2;
    CHECK_THROWS_AS(run_pipeline(setup.config), std::runtime_error);
}

TEST_CASE("run_pipeline rejects invalid configs and missing inputs") {
    PipelineConfig config;
    config.stages["lang"] = false;
    CHECK_THROWS_AS(run_pipeline(config), std::invalid_argument);  // no input

    config.input = "somewhere.jsonl";
    CHECK_THROWS_AS(run_pipeline(config), std::invalid_argument);  // no output_dir

    test::TempDir dir;
    config.output_dir = dir.file("out").string();
    config.shards = 0;
    CHECK_THROWS_AS(run_pipeline(config), std::invalid_argument);
}
