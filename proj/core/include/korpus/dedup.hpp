#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "korpus/document.hpp"
#include "korpus/hash.hpp"

namespace korpus {

inline constexpr size_t kMinHashFunctions = 112;
inline constexpr size_t kLshBands = 14;
inline constexpr size_t kLshRowsPerBand = 8;
inline constexpr uint64_t kDefaultMinHashSeed = 42;
inline constexpr size_t kShingleWidth = 23;
inline constexpr size_t kDefaultMaxBucket = 50000;

// First-wins exact deduplication on a 128-bit digest of the raw text bytes.
// Collisions are negligible at corpus scale (birthday bound ~2^-64 at 10^10
// docs). admit() returns false for any text seen before.
class ExactDeduper {
public:
    bool admit(const Document& doc);
    size_t unique_count() const { return seen_.size(); }
    size_t duplicate_count() const { return duplicates_; }

private:
    std::unordered_set<Digest128, Digest128Hasher> seen_;
    size_t duplicates_ = 0;
};

// Whitespace-collapsed shingling: runs of ASCII whitespace become a single
// space, ends trimmed, then every 23-code-point window (stride 1). Shorter
// non-empty texts yield the single whole-text shingle; empty texts none.
std::vector<std::string> shingles(std::string_view text);

struct MinHashSignature {
    std::string doc_id;
    std::array<uint64_t, kMinHashFunctions> values;
    bool degenerate = false;  // empty shingle set; values are all-max

    double estimate_jaccard(const MinHashSignature& other) const;
};

// 112 seeds drawn from mt19937_64(seed); the i-th hash of a shingle is
// mix64(hash64(shingle) ^ seeds[i]).
std::vector<uint64_t> minhash_seeds(uint64_t seed = kDefaultMinHashSeed);

MinHashSignature minhash(std::string doc_id, std::string_view text,
                         const std::vector<uint64_t>& seeds);

using Edge = std::pair<std::string, std::string>;

// Groups signatures by 14 band keys (hash of 8 consecutive values). Every
// pair sharing a band key becomes an edge; buckets above max_bucket are
// star-connected through their first member instead of all-pairs (same
// components, linear edge count). verify_jaccard > 0 additionally requires
// that fraction of matching signature coordinates before emitting an edge.
// Edges come out canonicalized (first < second), sorted and unique.
struct LshResult {
    std::vector<Edge> edges;
    size_t oversized_buckets = 0;
};
LshResult lsh_candidates(const std::vector<MinHashSignature>& signatures,
                         size_t max_bucket = kDefaultMaxBucket,
                         double verify_jaccard = 0.0);

// Connected components over the edge list. Components list every node that
// appears in an edge, each sorted with the lexicographically smallest id
// first (the keep-winner); components themselves are sorted by winner.
struct DuplicateGraph {
    std::vector<Edge> edges;
    std::vector<std::vector<std::string>> components;
};
DuplicateGraph connected_components(std::vector<Edge> edges);

// Every component member except its winner, sorted.
std::vector<std::string> removal_list(const DuplicateGraph& graph);

// Signature file: magic "KMHSIG01", then little-endian u32 signature length,
// u64 doc count, and per doc a u16-length-prefixed id, u8 degenerate flag
// and 112 u64 values.
void write_signatures(const std::string& path, const std::vector<MinHashSignature>& sigs);
std::vector<MinHashSignature> read_signatures(const std::string& path);

// Edges as two-column JSONL {"a":…,"b":…}; removal list as one id per line.
void write_edges(const std::string& path, const std::vector<Edge>& edges);
std::vector<Edge> read_edges(const std::string& path);
void write_removal_list(const std::string& path, const std::vector<std::string>& ids);
std::vector<std::string> read_removal_list(const std::string& path);

}  // namespace korpus
