#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace mathrender::utf8 {

// Offset of the first byte that does not start a well-formed sequence
// (overlongs, surrogates and values above U+10FFFF are rejected).
std::optional<std::size_t> first_invalid(std::string_view s);

// Length of the sequence starting at s[i]; assumes valid input.
std::size_t sequence_length(unsigned char lead);

// Decodes the code point at s[i] and advances i.  Assumes valid input.
char32_t decode(std::string_view s, std::size_t& i);

void append(std::string& out, char32_t cp);
std::string encode(char32_t cp);

// The string holds exactly one code point.
std::optional<char32_t> single(std::string_view s);

}  // namespace mathrender::utf8
