#include "korpus/dedup.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "korpus/utf8.hpp"

namespace korpus {

namespace {

constexpr char kSigMagic[8] = {'K', 'M', 'H', 'S', 'I', 'G', '0', '1'};
constexpr uint64_t kBandSeed = 0x42414E444B455953ULL;

std::u32string collapse_whitespace(std::string_view text) {
    const std::u32string cps = utf8::decode_lossy(text);
    std::u32string out;
    out.reserve(cps.size());
    bool pending_space = false;
    for (const char32_t c : cps) {
        if (utf8::is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out += U' ';
            pending_space = false;
            out += c;
        }
    }
    return out;
}

uint64_t window_hash(const char32_t* data, size_t n) {
    return hash64(std::string_view(reinterpret_cast<const char*>(data), n * sizeof(char32_t)));
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
    if (!in) throw std::runtime_error("truncated signature file: " + path);
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

class UnionFind {
public:
    explicit UnionFind(size_t n) : parent_(n), rank_(n, 0) {
        for (size_t i = 0; i < n; ++i) parent_[i] = i;
    }

    size_t find(size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(size_t a, size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        parent_[b] = a;
        if (rank_[a] == rank_[b]) ++rank_[a];
    }

private:
    std::vector<size_t> parent_;
    std::vector<uint8_t> rank_;
};

}  // namespace

bool ExactDeduper::admit(const Document& doc) {
    if (seen_.insert(digest128(doc.text)).second) return true;
    ++duplicates_;
    return false;
}

std::vector<std::string> shingles(std::string_view text) {
    const std::u32string collapsed = collapse_whitespace(text);
    std::vector<std::string> out;
    if (collapsed.empty()) return out;
    if (collapsed.size() <= kShingleWidth) {
        out.push_back(utf8::encode(collapsed));
        return out;
    }
    out.reserve(collapsed.size() - kShingleWidth + 1);
    for (size_t i = 0; i + kShingleWidth <= collapsed.size(); ++i) {
        out.push_back(utf8::encode(collapsed.substr(i, kShingleWidth)));
    }
    return out;
}

std::vector<uint64_t> minhash_seeds(uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<uint64_t> seeds(kMinHashFunctions);
    for (auto& s : seeds) s = rng();
    return seeds;
}

MinHashSignature minhash(std::string doc_id, std::string_view text,
                         const std::vector<uint64_t>& seeds) {
    if (seeds.size() != kMinHashFunctions) {
        throw std::invalid_argument("minhash needs exactly 112 seeds");
    }
    MinHashSignature sig;
    sig.doc_id = std::move(doc_id);
    sig.values.fill(UINT64_MAX);

    const std::u32string collapsed = collapse_whitespace(text);
    if (collapsed.empty()) {
        sig.degenerate = true;
        return sig;
    }
    const size_t width = std::min(collapsed.size(), kShingleWidth);
    const size_t windows = collapsed.size() - width + 1;
    for (size_t i = 0; i < windows; ++i) {
        const uint64_t base = window_hash(collapsed.data() + i, width);
        for (size_t f = 0; f < kMinHashFunctions; ++f) {
            const uint64_t h = mix64(base ^ seeds[f]);
            if (h < sig.values[f]) sig.values[f] = h;
        }
    }
    return sig;
}

double MinHashSignature::estimate_jaccard(const MinHashSignature& other) const {
    size_t matches = 0;
    for (size_t i = 0; i < kMinHashFunctions; ++i) {
        if (values[i] == other.values[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(kMinHashFunctions);
}

LshResult lsh_candidates(const std::vector<MinHashSignature>& signatures,
                         size_t max_bucket, double verify_jaccard) {
    LshResult result;
    const auto passes_verify = [&](size_t a, size_t b) {
        return verify_jaccard <= 0.0 ||
               signatures[a].estimate_jaccard(signatures[b]) >= verify_jaccard;
    };

    for (size_t band = 0; band < kLshBands; ++band) {
        std::unordered_map<uint64_t, std::vector<size_t>> buckets;
        for (size_t i = 0; i < signatures.size(); ++i) {
            const uint64_t* row = signatures[i].values.data() + band * kLshRowsPerBand;
            const uint64_t key = hash64(
                std::string_view(reinterpret_cast<const char*>(row),
                                 kLshRowsPerBand * sizeof(uint64_t)),
                kBandSeed + band);
            buckets[key].push_back(i);
        }
        for (const auto& [key, members] : buckets) {
            if (members.size() < 2) continue;
            if (members.size() > max_bucket) {
                ++result.oversized_buckets;
                for (size_t m = 1; m < members.size(); ++m) {
                    if (passes_verify(members[0], members[m])) {
                        result.edges.emplace_back(signatures[members[0]].doc_id,
                                                  signatures[members[m]].doc_id);
                    }
                }
                continue;
            }
            for (size_t a = 0; a < members.size(); ++a) {
                for (size_t b = a + 1; b < members.size(); ++b) {
                    if (passes_verify(members[a], members[b])) {
                        result.edges.emplace_back(signatures[members[a]].doc_id,
                                                  signatures[members[b]].doc_id);
                    }
                }
            }
        }
    }

    for (auto& [a, b] : result.edges) {
        if (b < a) std::swap(a, b);
    }
    std::sort(result.edges.begin(), result.edges.end());
    result.edges.erase(std::unique(result.edges.begin(), result.edges.end()),
                       result.edges.end());
    return result;
}

DuplicateGraph connected_components(std::vector<Edge> edges) {
    DuplicateGraph graph;
    std::unordered_map<std::string, size_t> index;
    std::vector<const std::string*> ids;
    const auto intern = [&](const std::string& id) {
        const auto [it, inserted] = index.try_emplace(id, ids.size());
        if (inserted) ids.push_back(&it->first);
        return it->second;
    };

    UnionFind uf(0);
    {
        for (const auto& [a, b] : edges) {
            intern(a);
            intern(b);
        }
        uf = UnionFind(ids.size());
        for (const auto& [a, b] : edges) uf.unite(index.at(a), index.at(b));
    }

    std::unordered_map<size_t, std::vector<std::string>> by_root;
    for (size_t i = 0; i < ids.size(); ++i) by_root[uf.find(i)].push_back(*ids[i]);

    graph.components.reserve(by_root.size());
    for (auto& [root, members] : by_root) {
        std::sort(members.begin(), members.end());
        graph.components.push_back(std::move(members));
    }
    std::sort(graph.components.begin(), graph.components.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    graph.edges = std::move(edges);
    return graph;
}

std::vector<std::string> removal_list(const DuplicateGraph& graph) {
    std::vector<std::string> removed;
    for (const auto& component : graph.components) {
        removed.insert(removed.end(), component.begin() + 1, component.end());
    }
    std::sort(removed.begin(), removed.end());
    return removed;
}

void write_signatures(const std::string& path, const std::vector<MinHashSignature>& sigs) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write signature file: " + path);
    out.write(kSigMagic, sizeof(kSigMagic));
    write_le<uint32_t>(out, static_cast<uint32_t>(kMinHashFunctions));
    write_le<uint64_t>(out, sigs.size());
    for (const auto& sig : sigs) {
        write_le<uint16_t>(out, static_cast<uint16_t>(sig.doc_id.size()));
        out.write(sig.doc_id.data(), static_cast<std::streamsize>(sig.doc_id.size()));
        write_le<uint8_t>(out, sig.degenerate ? 1 : 0);
        for (const uint64_t v : sig.values) write_le<uint64_t>(out, v);
    }
    if (!out.flush()) throw std::runtime_error("failed writing signature file: " + path);
}

std::vector<MinHashSignature> read_signatures(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open signature file: " + path);
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kSigMagic, sizeof(kSigMagic)) != 0) {
        throw std::runtime_error("not a signature file: " + path);
    }
    const uint32_t width = read_le<uint32_t>(in, path);
    if (width != kMinHashFunctions) {
        throw std::runtime_error("unsupported signature width in " + path);
    }
    const uint64_t count = read_le<uint64_t>(in, path);
    std::vector<MinHashSignature> sigs;
    sigs.reserve(count);
    for (uint64_t i = 0; i < count; ++i) {
        MinHashSignature sig;
        const uint16_t len = read_le<uint16_t>(in, path);
        sig.doc_id.resize(len);
        in.read(sig.doc_id.data(), len);
        if (!in) throw std::runtime_error("truncated signature file: " + path);
        sig.degenerate = read_le<uint8_t>(in, path) != 0;
        for (auto& v : sig.values) v = read_le<uint64_t>(in, path);
        sigs.push_back(std::move(sig));
    }
    return sigs;
}

void write_edges(const std::string& path, const std::vector<Edge>& edges) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write edge file: " + path);
    for (const auto& [a, b] : edges) {
        nlohmann::ordered_json j;
        j["a"] = a;
        j["b"] = b;
        out << j.dump() << '\n';
    }
    if (!out.flush()) throw std::runtime_error("failed writing edge file: " + path);
}

std::vector<Edge> read_edges(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge file: " + path);
    std::vector<Edge> edges;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = nlohmann::json::parse(line);
        edges.emplace_back(j.at("a").get<std::string>(), j.at("b").get<std::string>());
    }
    return edges;
}

void write_removal_list(const std::string& path, const std::vector<std::string>& ids) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write removal list: " + path);
    for (const auto& id : ids) out << id << '\n';
    if (!out.flush()) throw std::runtime_error("failed writing removal list: " + path);
}

std::vector<std::string> read_removal_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open removal list: " + path);
    std::vector<std::string> ids;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) ids.push_back(line);
    }
    return ids;
}

}  // namespace korpus
