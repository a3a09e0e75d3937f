#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>

#include "mathrender/result.hpp"
#include "mathrender/service/backend.hpp"
#include "mathrender/tex/limits.hpp"

namespace mathrender::service {

inline constexpr std::string_view kVersion = "0.3.0";

struct ServiceConfig {
  std::string host = "127.0.0.1";
  int port = 10044;
  std::size_t workers = 0;      // 0 = detected cores
  std::size_t queue_bound = 0;  // 0 = 4 × workers
  std::size_t cache_budget_bytes = 64u << 20;
  std::filesystem::path cache_path;  // empty = memory only
  int request_timeout_ms = 5000;
  Limits limits;
  BackendConfig backend;

  // Copies with the 0 defaults replaced by concrete values.
  ServiceConfig resolved() const;
};

// JSON object with any of the keys
//   host, port, workers, queue-bound, cache-budget-bytes, cache-path,
//   request-timeout-ms, limits {max-input-bytes, max-depth},
//   backend {mode, endpoint-url, timeout-ms, max-retries, backoff-ms, fallback-native}
// Unknown keys and wrong types are errors.
Result<ServiceConfig, std::string> parse_config(std::string_view json_text, ServiceConfig base = {});
Result<ServiceConfig, std::string> load_config(const std::filesystem::path& path, ServiceConfig base = {});

// MATHRENDER_PORT and MATHRENDER_WORKERS; the lookup defaults to getenv.
using EnvLookup = std::function<std::optional<std::string>(const char*)>;
Result<ServiceConfig, std::string> apply_env(ServiceConfig config, const EnvLookup& lookup = {});

std::optional<std::string> validate(const ServiceConfig& config);

}  // namespace mathrender::service
