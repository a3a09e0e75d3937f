#pragma once

#include <mutex>
#include <string>
#include <unordered_map>

#include "mathrender/cache/key.hpp"
#include "mathrender/cache/store.hpp"
#include "mathrender/service/config.hpp"
#include "mathrender/service/wire.hpp"

namespace mathrender::service {

struct RenderOutcome {
  int status = 200;
  RenderResponse response;
};

// Remembers which key an exact request spelling normalized to, so repeated
// requests skip parsing. Bounded by bytes; cleared wholesale when full.
class KeyMemo {
 public:
  explicit KeyMemo(std::size_t budget_bytes) : budget_(budget_bytes) {}

  std::optional<cache::CacheKey> find(const std::string& spelling) const;
  void remember(std::string spelling, const cache::CacheKey& key);

 private:
  mutable std::mutex mutex_;
  std::unordered_map<std::string, cache::CacheKey> keys_;
  std::size_t bytes_ = 0;
  std::size_t budget_;
};

// Stateless apart from the shared cache and the key memo: the outcome
// depends only on the request and the configuration.
class Renderer {
 public:
  Renderer(cache::RenderCache& cache, ServiceConfig config);

  // Normalizes, keys, serves from cache or renders all formats, stores
  // successes, then projects onto the requested formats.
  RenderOutcome render(const RenderRequest& request) const;

  // Key the request would be stored under, or std::nullopt when the input
  // does not parse.
  std::optional<cache::CacheKey> key_for(const RenderRequest& request) const;

 private:
  cache::RenderCache& cache_;
  ServiceConfig config_;
  mutable KeyMemo memo_;
};

// Stored payload: "MRP1", then mml, svg, html as u64 big-endian length and
// bytes, then the log line count and each line the same way.
struct CachedRender {
  std::string mml;
  std::string svg;
  std::string html;
  std::vector<std::string> log;
};

std::string encode_payload(const CachedRender& r);
std::optional<CachedRender> decode_payload(std::string_view payload);

}  // namespace mathrender::service
