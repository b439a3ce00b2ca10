#include "korpus/hash.hpp"

namespace korpus {

namespace {

inline std::uint64_t load_le64(const char* p, std::size_t n) {
    // Little-endian load of up to 8 bytes, zero padded.
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < n; ++i) {
        v |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    }
    return v;
}

constexpr std::uint64_t kLane1 = 0x9AE16A3B2F90404FULL;
constexpr std::uint64_t kLane2 = 0xC3A5C85C97CB3127ULL;
constexpr std::uint64_t kMul1 = 0x87C37B91114253D5ULL;

}  // namespace

Digest128 digest128(std::string_view data) {
    std::uint64_t h1 = kLane1 ^ (data.size() * kMul1);
    std::uint64_t h2 = kLane2 + data.size();

    const char* p = data.data();
    std::size_t remaining = data.size();
    while (remaining >= 8) {
        const std::uint64_t m = load_le64(p, 8);
        h1 = mix64(h1 ^ (m * kMul1));
        h2 = (h2 ^ mix64(m + kLane2)) * kMul1 + 0x52DCE729;
        p += 8;
        remaining -= 8;
    }
    if (remaining > 0) {
        const std::uint64_t m = load_le64(p, remaining) | (static_cast<std::uint64_t>(remaining) << 56);
        h1 = mix64(h1 ^ (m * kMul1));
        h2 = (h2 ^ mix64(m + kLane2)) * kMul1 + 0x52DCE729;
    }

    // Cross-mix so each output half depends on both lanes.
    const std::uint64_t a = mix64(h1 ^ h2);
    const std::uint64_t b = mix64(h2 + (h1 << 1) + 0x9E3779B97F4A7C15ULL);
    return Digest128{a, b};
}

std::string Digest128::hex() const {
    static const char* digits = "0123456789abcdef";
    std::string out(32, '0');
    for (int i = 0; i < 16; ++i) {
        const std::uint64_t word = i < 8 ? hi : lo;
        const int byte = i % 8;
        const auto v = static_cast<unsigned>((word >> (56 - 8 * byte)) & 0xFF);
        out[static_cast<std::size_t>(2 * i)] = digits[v >> 4];
        out[static_cast<std::size_t>(2 * i + 1)] = digits[v & 0xF];
    }
    return out;
}

}  // namespace korpus
