#include <doctest.h>

#include <set>
#include <string>

#include "korpus/hash.hpp"

using namespace korpus;

TEST_CASE("hash64 is deterministic and seed-sensitive") {
    CHECK(hash64("hello") == hash64("hello"));
    CHECK(hash64("hello") != hash64("hello", 1));
    CHECK(hash64("hello") != hash64("hellp"));
    CHECK(hash64("") != hash64("a"));
}

TEST_CASE("mix64 avalanche changes many bits") {
    const std::uint64_t a = mix64(1);
    const std::uint64_t b = mix64(2);
    int differing = 0;
    for (int i = 0; i < 64; ++i) {
        if (((a >> i) & 1) != ((b >> i) & 1)) ++differing;
    }
    CHECK(differing > 16);
}

TEST_CASE("digest128 distinguishes near-identical inputs") {
    CHECK(digest128("abc") == digest128("abc"));
    CHECK(digest128("abc") != digest128("abd"));
    CHECK(digest128("abc") != digest128("abc "));
    CHECK(digest128("") != digest128(std::string_view("\0", 1)));
}

TEST_CASE("digest128 length tagging separates padded inputs") {
    // Same 8-byte prefix, different lengths.
    CHECK(digest128(std::string(8, 'x')) != digest128(std::string(9, 'x')));
    CHECK(digest128(std::string("ab\0", 3)) != digest128(std::string("ab\0\0", 4)));
}

TEST_CASE("digest128 has no trivial collisions over many inputs") {
    std::set<std::string> seen;
    for (int i = 0; i < 20000; ++i) {
        const auto d = digest128("doc-" + std::to_string(i));
        seen.insert(d.hex());
    }
    CHECK(seen.size() == 20000);
}

TEST_CASE("digest hex is 32 lowercase hex chars") {
    const auto h = digest128("x").hex();
    CHECK(h.size() == 32);
    for (char c : h) CHECK(((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f')));
}
