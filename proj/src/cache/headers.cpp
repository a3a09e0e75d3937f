#include "mathrender/cache/headers.hpp"

namespace mathrender::cache {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

}  // namespace

std::string_view content_type(BodyFormat format) {
  switch (format) {
    case BodyFormat::Json: return "application/json; charset=utf-8";
    case BodyFormat::Svg: return "image/svg+xml; charset=utf-8";
    case BodyFormat::MathML: return "application/mathml+xml; charset=utf-8";
    case BodyFormat::Css: return "text/css; charset=utf-8";
  }
  return "application/octet-stream";
}

HeaderList cache_headers(const CacheKey& key, BodyFormat format) {
  return {
      {"ETag", "\"" + key.hex + "\""},
      {"Cache-Control", "public, max-age=" + std::to_string(kMaxAgeSeconds) + ", immutable"},
      {"Content-Type", std::string(content_type(format))},
  };
}

bool matches_if_none_match(std::string_view header_value, const CacheKey& key) {
  while (!header_value.empty()) {
    const std::size_t comma = header_value.find(',');
    std::string_view tag = trim(header_value.substr(0, comma));
    header_value = comma == std::string_view::npos ? std::string_view{} : header_value.substr(comma + 1);
    if (tag == "*") return true;
    if (tag.substr(0, 2) == "W/") tag.remove_prefix(2);
    if (tag.size() >= 2 && tag.front() == '"' && tag.back() == '"') tag = tag.substr(1, tag.size() - 2);
    if (tag == key.hex) return true;
  }
  return false;
}

}  // namespace mathrender::cache
