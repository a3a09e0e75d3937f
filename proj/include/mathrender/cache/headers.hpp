#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mathrender/cache/key.hpp"

namespace mathrender::cache {

enum class BodyFormat { Json, Svg, MathML, Css };

std::string_view content_type(BodyFormat format);

// One year; keys change whenever content could change.
inline constexpr int kMaxAgeSeconds = 31536000;

using HeaderList = std::vector<std::pair<std::string, std::string>>;

// ETag (quoted key), Cache-Control and Content-Type for a keyed response.
HeaderList cache_headers(const CacheKey& key, BodyFormat format);

// True when an If-None-Match value lists the key (quoted, weak or "*").
bool matches_if_none_match(std::string_view header_value, const CacheKey& key);

}  // namespace mathrender::cache
