#include "mathrender/service/config.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <json.hpp>

#include "mathrender/service/worker_pool.hpp"

namespace mathrender::service {
namespace {

using Json = nlohmann::json;

struct ConfigError {
  std::string message;
};

template <typename T>
T number(const Json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError{"\"" + name + "\" must be an integer"};
  if constexpr (std::is_unsigned_v<T>) {
    if (v.get<long long>() < 0) throw ConfigError{"\"" + name + "\" must not be negative"};
  }
  return v.get<T>();
}

std::string text(const Json& v, const std::string& name) {
  if (!v.is_string()) throw ConfigError{"\"" + name + "\" must be a string"};
  return v.get<std::string>();
}

bool flag(const Json& v, const std::string& name) {
  if (!v.is_boolean()) throw ConfigError{"\"" + name + "\" must be true or false"};
  return v.get<bool>();
}

void read_limits(const Json& j, Limits& limits) {
  if (!j.is_object()) throw ConfigError{"\"limits\" must be an object"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (it.key() == "max-input-bytes") {
      limits.max_input_bytes = number<std::size_t>(it.value(), it.key());
    } else if (it.key() == "max-depth") {
      limits.max_depth = number<std::size_t>(it.value(), it.key());
    } else {
      throw ConfigError{"unknown key \"limits." + it.key() + "\""};
    }
  }
}

void read_backend(const Json& j, BackendConfig& b) {
  if (!j.is_object()) throw ConfigError{"\"backend\" must be an object"};
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& k = it.key();
    if (k == "mode") {
      const std::string m = text(it.value(), k);
      if (m == "native") {
        b.mode = BackendConfig::Mode::Native;
      } else if (m == "external") {
        b.mode = BackendConfig::Mode::External;
      } else {
        throw ConfigError{"\"backend.mode\" must be \"native\" or \"external\""};
      }
    } else if (k == "endpoint-url") {
      b.endpoint_url = text(it.value(), k);
    } else if (k == "timeout-ms") {
      b.timeout_ms = number<int>(it.value(), k);
    } else if (k == "max-retries") {
      b.max_retries = number<int>(it.value(), k);
    } else if (k == "backoff-ms") {
      b.backoff_ms = number<int>(it.value(), k);
    } else if (k == "fallback-native") {
      b.fallback_native = flag(it.value(), k);
    } else {
      throw ConfigError{"unknown key \"backend." + k + "\""};
    }
  }
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || end != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

ServiceConfig ServiceConfig::resolved() const {
  ServiceConfig c = *this;
  if (c.workers == 0) c.workers = detected_cores();
  if (c.queue_bound == 0) c.queue_bound = 4 * c.workers;
  return c;
}

Result<ServiceConfig, std::string> parse_config(std::string_view json_text, ServiceConfig c) {
  Json j = Json::parse(json_text.begin(), json_text.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::string("configuration must be a JSON object");
  try {
    for (auto it = j.begin(); it != j.end(); ++it) {
      const std::string& k = it.key();
      const Json& v = it.value();
      if (k == "host") {
        c.host = text(v, k);
      } else if (k == "port") {
        c.port = number<int>(v, k);
      } else if (k == "workers") {
        c.workers = number<std::size_t>(v, k);
      } else if (k == "queue-bound") {
        c.queue_bound = number<std::size_t>(v, k);
      } else if (k == "cache-budget-bytes") {
        c.cache_budget_bytes = number<std::size_t>(v, k);
      } else if (k == "cache-path") {
        c.cache_path = text(v, k);
      } else if (k == "request-timeout-ms") {
        c.request_timeout_ms = number<int>(v, k);
      } else if (k == "limits") {
        read_limits(v, c.limits);
      } else if (k == "backend") {
        read_backend(v, c.backend);
      } else {
        throw ConfigError{"unknown key \"" + k + "\""};
      }
    }
  } catch (const ConfigError& e) {
    return e.message;
  }
  if (auto problem = validate(c)) return *problem;
  return c;
}

Result<ServiceConfig, std::string> load_config(const std::filesystem::path& path, ServiceConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot read configuration file " + path.string();
  const std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  auto parsed = parse_config(content, std::move(base));
  if (!parsed) return path.string() + ": " + parsed.error();
  return parsed;
}

Result<ServiceConfig, std::string> apply_env(ServiceConfig c, const EnvLookup& lookup) {
  auto get = [&](const char* name) -> std::optional<std::string> {
    if (lookup) return lookup(name);
    const char* v = std::getenv(name);
    if (!v) return std::nullopt;
    return std::string(v);
  };
  if (auto port = get("MATHRENDER_PORT")) {
    auto v = parse_int(*port);
    if (!v || *v < 0 || *v > 65535) return "MATHRENDER_PORT must be a port number, got \"" + *port + "\"";
    c.port = static_cast<int>(*v);
  }
  if (auto workers = get("MATHRENDER_WORKERS")) {
    auto v = parse_int(*workers);
    if (!v || *v < 1) return "MATHRENDER_WORKERS must be a positive integer, got \"" + *workers + "\"";
    c.workers = static_cast<std::size_t>(*v);
  }
  return c;
}

std::optional<std::string> validate(const ServiceConfig& c) {
  if (c.port < 0 || c.port > 65535) return "port must be between 0 and 65535";
  if (c.request_timeout_ms <= 0) return "request-timeout-ms must be positive";
  if (c.limits.max_input_bytes == 0 || c.limits.max_depth == 0) return "limits must be positive";
  return validate(c.backend);
}

}  // namespace mathrender::service
