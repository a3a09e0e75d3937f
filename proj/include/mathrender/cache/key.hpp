#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace mathrender::cache {

// Bumped whenever rendering output changes, which invalidates every key.
inline constexpr std::uint8_t kFormatVersion = 1;

enum class InputType { Tex, Mml };

std::string_view to_string(InputType type);

// Options that influence the rendered bytes (charset, display style, ...).
using KeyOptions = std::map<std::string, std::string>;

// 64 lowercase hex digits.
struct CacheKey {
  std::string hex;

  bool operator==(const CacheKey&) const = default;
  auto operator<=>(const CacheKey&) const = default;
};

// SHA-256 over: version byte, type tag byte ('t' or 'm'), 8-byte big-endian
// input length, input bytes, then "name=value\n" for each option in name
// order.  The input must already be normalized.
CacheKey cache_key(InputType type, std::string_view normalized_input, const KeyOptions& options);

bool is_valid_key(std::string_view hex);

// Lowercase hex SHA-256 of arbitrary bytes.
std::string sha256_hex(std::string_view bytes);

}  // namespace mathrender::cache
