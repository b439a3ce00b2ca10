#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "korpus/dedup.hpp"
#include "korpus/hash.hpp"
#include "korpus/heuristic_filters.hpp"
#include "korpus/html_text.hpp"
#include "korpus/lang_id.hpp"

namespace {

std::string sample_text(size_t target_bytes, unsigned seed = 7) {
    static const char* words[] = {"der", "und", "die", "straße", "haus", "über",
                                  "wald", "fluss", "größe", "stadt", "land", "42"};
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> pick(0, 11);
    std::uniform_int_distribution<int> brk(0, 15);
    std::string text;
    while (text.size() < target_bytes) {
        text += words[pick(rng)];
        const int b = brk(rng);
        if (b == 0) {
            text += "\n\n";
        } else if (b < 3) {
            text += '\n';
        } else {
            text += ' ';
        }
    }
    return text;
}

void bm_digest128(benchmark::State& state) {
    const std::string text = sample_text(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::digest128(text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}

void bm_repetition_filter(benchmark::State& state) {
    korpus::Document doc;
    doc.id = "bench";
    doc.text = sample_text(static_cast<size_t>(state.range(0)));
    const korpus::FilterConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::repetition_filter(doc, cfg));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * doc.text.size()));
}

void bm_document_filter(benchmark::State& state) {
    korpus::Document doc;
    doc.id = "bench";
    doc.text = sample_text(static_cast<size_t>(state.range(0)));
    const korpus::FilterConfig cfg;
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::document_filter(doc, cfg));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * doc.text.size()));
}

void bm_shingles(benchmark::State& state) {
    const std::string text = sample_text(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::shingles(text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}

void bm_minhash(benchmark::State& state) {
    const std::string text = sample_text(static_cast<size_t>(state.range(0)));
    const auto seeds = korpus::minhash_seeds();
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::minhash("bench", text, seeds));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}

void bm_lsh_candidates(benchmark::State& state) {
    const auto seeds = korpus::minhash_seeds();
    std::vector<korpus::MinHashSignature> sigs;
    for (int i = 0; i < state.range(0); ++i) {
        const std::string text = sample_text(2048, static_cast<unsigned>(100 + i));
        sigs.push_back(korpus::minhash("doc-" + std::to_string(i), text, seeds));
    }
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::lsh_candidates(sigs));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}

void bm_language_scores(benchmark::State& state) {
    std::vector<korpus::LabeledText> corpus;
    for (int i = 0; i < 50; ++i) {
        corpus.push_back({sample_text(256), "de"});
        corpus.push_back({"the quick brown fox jumps over the lazy dog number " +
                              std::to_string(i),
                          "en"});
    }
    const auto model = korpus::train_lang_model(corpus, 1, 3, 0.5, 16);
    const std::string text = sample_text(static_cast<size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::language_scores(model, text));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * text.size()));
}

void bm_html_to_text(benchmark::State& state) {
    std::string html = "<html><head><title>x</title></head><body>";
    const std::string para = "<p>Ein Absatz mit etwas l&auml;ngerem Inhalt und Struktur.</p>";
    while (html.size() < static_cast<size_t>(state.range(0))) html += para;
    html += "</body></html>";
    for (auto _ : state) {
        benchmark::DoNotOptimize(korpus::html_to_text(html));
    }
    state.SetBytesProcessed(static_cast<int64_t>(state.iterations() * html.size()));
}

}  // namespace

BENCHMARK(bm_digest128)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_repetition_filter)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_document_filter)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_shingles)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_minhash)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(bm_lsh_candidates)->Arg(256)->Arg(1024);
BENCHMARK(bm_language_scores)->Arg(1 << 10)->Arg(1 << 14);
BENCHMARK(bm_html_to_text)->Arg(1 << 14);

BENCHMARK_MAIN();
