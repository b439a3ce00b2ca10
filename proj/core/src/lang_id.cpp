#include "korpus/lang_id.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "korpus/hash.hpp"
#include "korpus/utf8.hpp"

namespace korpus {

namespace {

constexpr char kMagic[8] = {'K', 'L', 'I', 'D', 'M', 'D', '0', '1'};
constexpr uint64_t kGramSeed = 0x4752414D53454544ULL;

uint32_t gram_bucket(const char32_t* data, size_t n, uint32_t mask) {
    const auto* bytes = reinterpret_cast<const char*>(data);
    return static_cast<uint32_t>(hash64(std::string_view(bytes, n * sizeof(char32_t)), kGramSeed)) & mask;
}

template <typename Fn>
void for_each_gram(const std::u32string& cps, int nmin, int nmax, Fn&& fn) {
    const size_t len = cps.size();
    for (int n = nmin; n <= nmax; ++n) {
        if (len < static_cast<size_t>(n)) break;
        for (size_t i = 0; i + n <= len; ++i) fn(cps.data() + i, static_cast<size_t>(n));
    }
}

template <typename T>
void write_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw std::runtime_error("truncated language model file");
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

LangModel train_lang_model(const std::vector<LabeledText>& corpus,
                           int ngram_min, int ngram_max,
                           double smoothing_k, uint32_t bucket_bits) {
    if (smoothing_k <= 0.0) throw std::invalid_argument("smoothing k must be > 0");
    if (ngram_min < 1 || ngram_max < ngram_min) throw std::invalid_argument("bad ngram range");
    if (bucket_bits == 0 || bucket_bits > 30) throw std::invalid_argument("bad bucket_bits");

    std::set<std::string> langs;
    for (const auto& item : corpus) langs.insert(item.language);
    if (langs.size() < 2) {
        throw std::invalid_argument("training corpus must contain at least two languages");
    }

    LangModel model;
    model.languages.assign(langs.begin(), langs.end());
    model.ngram_min = ngram_min;
    model.ngram_max = ngram_max;
    model.smoothing_k = smoothing_k;
    model.bucket_bits = bucket_bits;

    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < model.languages.size(); ++i) index[model.languages[i]] = i;

    const size_t L = model.languages.size();
    const uint32_t mask = model.bucket_count() - 1;
    std::vector<std::unordered_map<uint32_t, uint64_t>> counts(L);
    std::vector<uint64_t> totals(L, 0);
    model.trained_docs.assign(L, 0);

    for (const auto& item : corpus) {
        const size_t li = index.at(item.language);
        ++model.trained_docs[li];
        const std::u32string cps = utf8::decode_lossy(item.text);
        for_each_gram(cps, ngram_min, ngram_max, [&](const char32_t* data, size_t n) {
            ++counts[li][gram_bucket(data, n, mask)];
            ++totals[li];
        });
    }

    const double total_docs = static_cast<double>(corpus.size());
    const double kB = smoothing_k * static_cast<double>(model.bucket_count());
    model.log_priors.resize(L);
    model.default_log_likelihood.resize(L);
    model.weights.resize(L);
    for (size_t li = 0; li < L; ++li) {
        model.log_priors[li] = std::log(static_cast<double>(model.trained_docs[li]) / total_docs);
        const double denom = static_cast<double>(totals[li]) + kB;
        model.default_log_likelihood[li] = std::log(smoothing_k / denom);
        model.weights[li].reserve(counts[li].size());
        for (const auto& [bucket, count] : counts[li]) {
            model.weights[li][bucket] = std::log((static_cast<double>(count) + smoothing_k) / denom);
        }
    }
    return model;
}

std::vector<double> language_scores(const LangModel& model, std::string_view text) {
    const size_t L = model.languages.size();
    std::vector<double> scores = model.log_priors;
    const uint32_t mask = model.bucket_count() - 1;
    const std::u32string cps = utf8::decode_lossy(text);
    for_each_gram(cps, model.ngram_min, model.ngram_max, [&](const char32_t* data, size_t n) {
        const uint32_t bucket = gram_bucket(data, n, mask);
        for (size_t li = 0; li < L; ++li) {
            const auto it = model.weights[li].find(bucket);
            scores[li] += it != model.weights[li].end() ? it->second
                                                        : model.default_log_likelihood[li];
        }
    });

    const double peak = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - peak);
        sum += s;
    }
    for (double& s : scores) s /= sum;
    return scores;
}

LangScore classify_language(Document& doc, const LangModel& model) {
    const auto scores = language_scores(model, doc.text);
    const size_t best = static_cast<size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
    doc.language = model.languages[best];
    return {model.languages[best], scores[best]};
}

FilterOutcome filter_language(Document& doc, const LangModel& model,
                              const std::string& target, double min_score) {
    const LangScore top = classify_language(doc, model);
    FilterOutcome out;
    out.measured["lang_score"] = top.score;
    if (top.language != target || top.score < min_score) {
        out.keep = false;
        out.reason = "lang";
    }
    return out;
}

void save_lang_model(const LangModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write language model: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_le<uint32_t>(out, static_cast<uint32_t>(model.languages.size()));
    for (const auto& lang : model.languages) {
        write_le<uint16_t>(out, static_cast<uint16_t>(lang.size()));
        out.write(lang.data(), static_cast<std::streamsize>(lang.size()));
    }
    write_le<uint8_t>(out, static_cast<uint8_t>(model.ngram_min));
    write_le<uint8_t>(out, static_cast<uint8_t>(model.ngram_max));
    write_le<double>(out, model.smoothing_k);
    write_le<uint32_t>(out, model.bucket_bits);
    for (size_t li = 0; li < model.languages.size(); ++li) {
        write_le<double>(out, model.log_priors[li]);
        write_le<double>(out, model.default_log_likelihood[li]);
        write_le<uint64_t>(out, model.trained_docs[li]);
        // Sorted entries keep the file byte-stable across runs.
        std::map<uint32_t, double> sorted(model.weights[li].begin(), model.weights[li].end());
        write_le<uint64_t>(out, sorted.size());
        for (const auto& [bucket, ll] : sorted) {
            write_le<uint32_t>(out, bucket);
            write_le<double>(out, ll);
        }
    }
    if (!out.flush()) throw std::runtime_error("failed writing language model: " + path);

    nlohmann::ordered_json side;
    side["languages"] = model.languages;
    side["ngram_range"] = {model.ngram_min, model.ngram_max};
    side["k"] = model.smoothing_k;
    side["bucket_bits"] = model.bucket_bits;
    side["trained_docs"] = model.trained_docs;
    std::ofstream meta(path + ".json", std::ios::trunc);
    if (!meta) throw std::runtime_error("cannot write model sidecar: " + path + ".json");
    meta << side.dump(2) << '\n';
}

LangModel load_lang_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open language model: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a language model file: " + path);
    }
    LangModel model;
    const uint32_t L = read_le<uint32_t>(in);
    if (L < 2 || L > 10000) throw std::runtime_error("corrupt language model: " + path);
    model.languages.resize(L);
    for (auto& lang : model.languages) {
        const uint16_t len = read_le<uint16_t>(in);
        lang.resize(len);
        in.read(lang.data(), len);
        if (!in) throw std::runtime_error("truncated language model file");
    }
    model.ngram_min = read_le<uint8_t>(in);
    model.ngram_max = read_le<uint8_t>(in);
    model.smoothing_k = read_le<double>(in);
    model.bucket_bits = read_le<uint32_t>(in);
    if (model.ngram_min < 1 || model.ngram_max < model.ngram_min || model.bucket_bits > 30 ||
        !std::isfinite(model.smoothing_k) || model.smoothing_k <= 0.0) {
        throw std::runtime_error("corrupt language model: " + path);
    }
    model.log_priors.resize(L);
    model.default_log_likelihood.resize(L);
    model.trained_docs.resize(L);
    model.weights.resize(L);
    for (uint32_t li = 0; li < L; ++li) {
        model.log_priors[li] = read_le<double>(in);
        model.default_log_likelihood[li] = read_le<double>(in);
        model.trained_docs[li] = read_le<uint64_t>(in);
        if (!std::isfinite(model.log_priors[li]) || !std::isfinite(model.default_log_likelihood[li])) {
            throw std::runtime_error("corrupt language model: " + path);
        }
        const uint64_t entries = read_le<uint64_t>(in);
        model.weights[li].reserve(entries);
        for (uint64_t e = 0; e < entries; ++e) {
            const uint32_t bucket = read_le<uint32_t>(in);
            const double ll = read_le<double>(in);
            if (!std::isfinite(ll)) throw std::runtime_error("corrupt language model: " + path);
            model.weights[li][bucket] = ll;
        }
    }
    return model;
}

}  // namespace korpus
