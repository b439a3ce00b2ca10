#pragma once

#include <cstdint>
#include <string>
#include <string_view>

// Minimal UTF-8 handling plus the character classes used by the text
// filters. Classification covers ASCII, Latin-1 Supplement and Latin
// Extended-A/B, which is sufficient for German and most European web text;
// other scripts are treated as non-alphabetic.

namespace korpus::utf8 {

inline constexpr char32_t kReplacement = 0xFFFD;

// Decodes UTF-8 into code points. Invalid bytes decode to U+FFFD one byte at
// a time, so the mapping is total and deterministic.
std::u32string decode_lossy(std::string_view bytes);

// Decodes the code point starting at byte offset `i` and advances `i` past it.
char32_t decode_one(std::string_view bytes, std::size_t& i);

std::string encode(std::u32string_view cps);

std::size_t count_codepoints(std::string_view bytes);

inline bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\v' || c == U'\f';
}

inline bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_alpha(char32_t c) {
    if ((c >= U'A' && c <= U'Z') || (c >= U'a' && c <= U'z')) return true;
    if (c == 0x00D7 || c == 0x00F7) return false;  // multiplication/division signs
    if (c >= 0x00C0 && c <= 0x00FF) return true;   // Latin-1 letters
    if (c >= 0x0100 && c <= 0x024F) return true;   // Latin Extended-A/B
    return false;
}

inline bool is_upper(char32_t c) {
    if (c >= U'A' && c <= U'Z') return true;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return true;
    return false;
}

inline bool is_lower(char32_t c) {
    if (c >= U'a' && c <= U'z') return true;
    if (c >= 0x00DF && c <= 0x00FF && c != 0x00F7) return true;
    return false;
}

inline char32_t to_lower(char32_t c) {
    if (c >= U'A' && c <= U'Z') return c + 32;
    if (c >= 0x00C0 && c <= 0x00DE && c != 0x00D7) return c + 32;
    return c;
}

}  // namespace korpus::utf8
