#include "korpus/linear_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <set>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "korpus/hash.hpp"
#include "korpus/utf8.hpp"

namespace korpus {

namespace {

constexpr char kMagic[8] = {'K', 'L', 'I', 'N', 'C', 'L', '0', '1'};
constexpr uint64_t kWordSeed = 0x574F524431475241ULL;
constexpr uint64_t kBigramSeed = 0x574F524432475241ULL;
constexpr uint64_t kCharSeed = 0x4348415247524121ULL;

// Sparse normalized feature vector of a text.
std::unordered_map<uint32_t, double> featurize(std::string_view text, uint32_t mask) {
    std::u32string cps = utf8::decode_lossy(text);
    for (char32_t& c : cps) c = utf8::to_lower(c);

    std::unordered_map<uint32_t, double> counts;
    size_t total = 0;
    const auto add = [&](uint64_t h) {
        ++counts[static_cast<uint32_t>(h) & mask];
        ++total;
    };
    const auto hash_cps = [](const char32_t* data, size_t n, uint64_t seed) {
        return hash64(std::string_view(reinterpret_cast<const char*>(data),
                                       n * sizeof(char32_t)),
                      seed);
    };

    // Word unigrams and bigrams.
    std::vector<std::pair<size_t, size_t>> words;
    size_t i = 0;
    while (i < cps.size()) {
        while (i < cps.size() && utf8::is_space(cps[i])) ++i;
        const size_t start = i;
        while (i < cps.size() && !utf8::is_space(cps[i])) ++i;
        if (i > start) words.emplace_back(start, i - start);
    }
    for (size_t w = 0; w < words.size(); ++w) {
        const uint64_t h = hash_cps(cps.data() + words[w].first, words[w].second, kWordSeed);
        add(h);
        if (w + 1 < words.size()) {
            const uint64_t h2 =
                hash_cps(cps.data() + words[w + 1].first, words[w + 1].second, kWordSeed);
            add(hash_combine64(hash_combine64(kBigramSeed, h), h2));
        }
    }

    // Character 3-5-grams over the whitespace-collapsed text.
    std::u32string collapsed;
    collapsed.reserve(cps.size());
    for (const auto& [start, len] : words) {
        if (!collapsed.empty()) collapsed += U' ';
        collapsed.append(cps, start, len);
    }
    for (size_t n = 3; n <= 5; ++n) {
        if (collapsed.size() < n) break;
        for (size_t p = 0; p + n <= collapsed.size(); ++p) {
            add(hash_cps(collapsed.data() + p, n, kCharSeed + n));
        }
    }

    if (total > 0) {
        const double norm = 1.0 / static_cast<double>(total);
        for (auto& [bucket, value] : counts) value *= norm;
    }
    return counts;
}

std::vector<double> raw_scores(const LinearModel& model,
                               const std::unordered_map<uint32_t, double>& features) {
    std::vector<double> scores = model.bias;
    for (size_t li = 0; li < model.labels.size(); ++li) {
        const auto& w = model.weights[li];
        for (const auto& [bucket, value] : features) scores[li] += w[bucket] * value;
    }
    return scores;
}

void softmax_inplace(std::vector<double>& scores) {
    const double peak = *std::max_element(scores.begin(), scores.end());
    double sum = 0.0;
    for (double& s : scores) {
        s = std::exp(s - peak);
        sum += s;
    }
    for (double& s : scores) s /= sum;
}

template <typename T>
void write_le(std::ostream& out, T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
}

template <typename T>
T read_le(std::istream& in, const std::string& path) {
    unsigned char buf[sizeof(T)];
    in.read(reinterpret_cast<char*>(buf), sizeof(T));
    if (!in) throw std::runtime_error("truncated model file: " + path);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

}  // namespace

TrainResult train_classifier(const std::vector<LabeledText>& data, const TrainOptions& options) {
    if (options.epochs < 1 || options.learning_rate <= 0.0 || options.bucket_bits == 0 ||
        options.bucket_bits > 26 || options.val_fraction < 0.0 || options.val_fraction >= 1.0) {
        throw std::invalid_argument("bad training options");
    }
    std::set<std::string> label_set;
    for (const auto& item : data) label_set.insert(item.language);
    if (label_set.size() < 2) {
        throw std::invalid_argument("training data must contain at least two labels");
    }

    TrainResult result;
    LinearModel& model = result.model;
    model.labels.assign(label_set.begin(), label_set.end());
    model.bucket_bits = options.bucket_bits;
    model.weights.assign(model.labels.size(), std::vector<double>(model.bucket_count(), 0.0));
    model.bias.assign(model.labels.size(), 0.0);

    std::unordered_map<std::string, size_t> label_index;
    for (size_t i = 0; i < model.labels.size(); ++i) label_index[model.labels[i]] = i;

    std::mt19937_64 rng(options.seed);
    const auto shuffle_indices = [&](std::vector<size_t>& idx) {
        // Manual Fisher-Yates: identical sequence on every platform.
        for (size_t i = idx.size(); i > 1; --i) {
            const size_t j = static_cast<size_t>(rng() % i);
            std::swap(idx[i - 1], idx[j]);
        }
    };

    std::vector<size_t> order(data.size());
    for (size_t i = 0; i < order.size(); ++i) order[i] = i;
    shuffle_indices(order);

    std::vector<size_t> selected;
    if (options.balance) {
        std::unordered_map<std::string, size_t> counts;
        for (const auto& item : data) ++counts[item.language];
        size_t minority = SIZE_MAX;
        for (const auto& [label, count] : counts) minority = std::min(minority, count);
        std::unordered_map<std::string, size_t> taken;
        for (const size_t i : order) {
            if (taken[data[i].language] < minority) {
                ++taken[data[i].language];
                selected.push_back(i);
            }
        }
    } else {
        selected = order;
    }

    const size_t val_count = static_cast<size_t>(
        std::ceil(options.val_fraction * static_cast<double>(selected.size())));
    if (selected.size() - val_count < 2) throw std::invalid_argument("not enough training data");
    std::vector<size_t> val_idx(selected.end() - static_cast<ptrdiff_t>(val_count), selected.end());
    std::vector<size_t> train_idx(selected.begin(), selected.end() - static_cast<ptrdiff_t>(val_count));

    const uint32_t mask = model.bucket_count() - 1;
    std::vector<std::unordered_map<uint32_t, double>> features;
    features.reserve(data.size());
    for (const auto& item : data) features.push_back(featurize(item.text, mask));

    const auto full_pass_loss = [&] {
        double loss = 0.0;
        for (const size_t i : train_idx) {
            auto scores = raw_scores(model, features[i]);
            softmax_inplace(scores);
            const double p = std::max(scores[label_index.at(data[i].language)], 1e-15);
            loss -= std::log(p);
        }
        return loss / static_cast<double>(train_idx.size());
    };

    const uint64_t total_updates =
        static_cast<uint64_t>(options.epochs) * static_cast<uint64_t>(train_idx.size());
    uint64_t update = 0;
    for (int epoch = 0; epoch < options.epochs; ++epoch) {
        shuffle_indices(train_idx);
        for (const size_t i : train_idx) {
            const double lr = options.learning_rate *
                              (1.0 - static_cast<double>(update) / static_cast<double>(total_updates));
            ++update;
            auto scores = raw_scores(model, features[i]);
            softmax_inplace(scores);
            const size_t truth = label_index.at(data[i].language);
            for (size_t li = 0; li < model.labels.size(); ++li) {
                const double grad = scores[li] - (li == truth ? 1.0 : 0.0);
                if (grad == 0.0) continue;
                auto& w = model.weights[li];
                for (const auto& [bucket, value] : features[i]) {
                    w[bucket] -= lr * grad * value;
                }
                model.bias[li] -= lr * grad;
            }
        }
        result.epoch_losses.push_back(full_pass_loss());
    }

    // Validation metrics, per label.
    std::map<std::string, size_t> tp, fp, fn;
    size_t correct = 0;
    for (const size_t i : val_idx) {
        auto scores = raw_scores(model, features[i]);
        softmax_inplace(scores);
        const size_t best = static_cast<size_t>(
            std::max_element(scores.begin(), scores.end()) - scores.begin());
        const std::string& pred = model.labels[best];
        const std::string& truth = data[i].language;
        result.val_pred_truth.emplace_back(pred, truth);
        if (pred == truth) {
            ++correct;
            ++tp[pred];
        } else {
            ++fp[pred];
            ++fn[truth];
        }
    }
    for (const auto& label : model.labels) {
        PrecisionRecall pr;
        const double denom_p = static_cast<double>(tp[label] + fp[label]);
        const double denom_r = static_cast<double>(tp[label] + fn[label]);
        pr.precision = denom_p > 0 ? static_cast<double>(tp[label]) / denom_p : 0.0;
        pr.recall = denom_r > 0 ? static_cast<double>(tp[label]) / denom_r : 0.0;
        result.validation[label] = pr;
    }
    result.validation_accuracy =
        val_idx.empty() ? 0.0 : static_cast<double>(correct) / static_cast<double>(val_idx.size());
    return result;
}

std::vector<double> predict_scores(const LinearModel& model, std::string_view text) {
    auto scores = raw_scores(model, featurize(text, model.bucket_count() - 1));
    softmax_inplace(scores);
    return scores;
}

Prediction predict(const LinearModel& model, std::string_view text) {
    const auto scores = predict_scores(model, text);
    const size_t best = static_cast<size_t>(
        std::max_element(scores.begin(), scores.end()) - scores.begin());
    return {model.labels[best], scores[best]};
}

void save_linear_model(const LinearModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out.write(kMagic, sizeof(kMagic));
    write_le<uint32_t>(out, static_cast<uint32_t>(model.labels.size()));
    for (const auto& label : model.labels) {
        write_le<uint16_t>(out, static_cast<uint16_t>(label.size()));
        out.write(label.data(), static_cast<std::streamsize>(label.size()));
    }
    write_le<uint32_t>(out, model.bucket_bits);
    for (size_t li = 0; li < model.labels.size(); ++li) {
        write_le<double>(out, model.bias[li]);
        uint64_t nnz = 0;
        for (const double w : model.weights[li]) nnz += w != 0.0 ? 1 : 0;
        write_le<uint64_t>(out, nnz);
        for (uint32_t bucket = 0; bucket < model.bucket_count(); ++bucket) {
            if (model.weights[li][bucket] != 0.0) {
                write_le<uint32_t>(out, bucket);
                write_le<double>(out, model.weights[li][bucket]);
            }
        }
    }
    if (!out.flush()) throw std::runtime_error("failed writing model file: " + path);

    nlohmann::ordered_json side;
    side["labels"] = model.labels;
    side["bucket_bits"] = model.bucket_bits;
    side["features"] = "word 1-2-grams + char 3-5-grams, hashed";
    std::ofstream meta(path + ".json", std::ios::trunc);
    if (!meta) throw std::runtime_error("cannot write model sidecar: " + path + ".json");
    meta << side.dump(2) << '\n';
}

LinearModel load_linear_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw std::runtime_error("not a classifier model file: " + path);
    }
    LinearModel model;
    const uint32_t label_count = read_le<uint32_t>(in, path);
    if (label_count < 2 || label_count > 10000) {
        throw std::runtime_error("corrupt model file: " + path);
    }
    model.labels.resize(label_count);
    for (auto& label : model.labels) {
        const uint16_t len = read_le<uint16_t>(in, path);
        label.resize(len);
        in.read(label.data(), len);
        if (!in) throw std::runtime_error("truncated model file: " + path);
    }
    model.bucket_bits = read_le<uint32_t>(in, path);
    if (model.bucket_bits == 0 || model.bucket_bits > 26) {
        throw std::runtime_error("corrupt model file: " + path);
    }
    model.weights.assign(label_count, std::vector<double>(model.bucket_count(), 0.0));
    model.bias.resize(label_count);
    for (uint32_t li = 0; li < label_count; ++li) {
        model.bias[li] = read_le<double>(in, path);
        const uint64_t nnz = read_le<uint64_t>(in, path);
        for (uint64_t e = 0; e < nnz; ++e) {
            const uint32_t bucket = read_le<uint32_t>(in, path);
            const double w = read_le<double>(in, path);
            if (bucket >= model.bucket_count() || !std::isfinite(w)) {
                throw std::runtime_error("corrupt model file: " + path);
            }
            model.weights[li][bucket] = w;
        }
        if (!std::isfinite(model.bias[li])) throw std::runtime_error("corrupt model file: " + path);
    }
    return model;
}

ExternalScores load_external_scores(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scores file: " + path);
    ExternalScores scores;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception&) {
            ++scores.rejected;
            continue;
        }
        if (!j.is_object() || !j.contains("doc_id") || !j["doc_id"].is_string()) {
            ++scores.rejected;
            continue;
        }
        ExternalScoreRecord record;
        bool valid = true;
        if (j.contains("edu_bert_score")) {
            if (j["edu_bert_score"].is_number_integer()) {
                const int v = j["edu_bert_score"].get<int>();
                if (v >= 1 && v <= 5) record.edu_bert_score = v;
                else valid = false;
            } else {
                valid = false;
            }
        }
        if (j.contains("grammar_bert_label")) {
            if (j["grammar_bert_label"].is_string()) {
                const auto v = j["grammar_bert_label"].get<std::string>();
                if (v == "high" || v == "low") record.grammar_bert_label = v;
                else valid = false;
            } else {
                valid = false;
            }
        }
        if (j.contains("instr_bert_prob")) {
            if (j["instr_bert_prob"].is_number()) {
                const double v = j["instr_bert_prob"].get<double>();
                if (v >= 0.0 && v <= 1.0) record.instr_bert_prob = v;
                else valid = false;
            } else {
                valid = false;
            }
        }
        if (!valid) {
            ++scores.rejected;
            continue;
        }
        scores.by_doc[j["doc_id"].get<std::string>()] = std::move(record);
    }
    return scores;
}

}  // namespace korpus
