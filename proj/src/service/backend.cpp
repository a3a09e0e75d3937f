#include "mathrender/service/backend.hpp"

#include <httplib.h>

#include <chrono>
#include <json.hpp>
#include <thread>

#include "mathrender/mml/xml.hpp"

namespace mathrender::service {
namespace {

struct Endpoint {
  std::string origin;  // scheme://host:port
  std::string path;
};

std::optional<Endpoint> split_url(const std::string& url) {
  const std::string scheme = "http://";
  if (url.compare(0, scheme.size(), scheme) != 0) return std::nullopt;
  const std::size_t slash = url.find('/', scheme.size());
  if (slash == scheme.size()) return std::nullopt;
  if (slash == std::string::npos) return Endpoint{url, "/"};
  return Endpoint{url.substr(0, slash), url.substr(slash)};
}

Result<mml::MathNode, BackendError> attempt(const Endpoint& ep, const std::string& body, const BackendConfig& config) {
  httplib::Client client(ep.origin);
  const auto timeout = std::chrono::milliseconds(config.timeout_ms);
  client.set_connection_timeout(timeout);
  client.set_read_timeout(timeout);
  client.set_write_timeout(timeout);
  auto res = client.Post(ep.path, body, "application/json");
  if (!res) {
    const httplib::Error err = res.error();
    const bool timed_out = err == httplib::Error::Read || err == httplib::Error::ConnectionTimeout;
    return BackendError{timed_out ? BackendErrorKind::Timeout : BackendErrorKind::HttpFailure,
                        "backend request failed: " + httplib::to_string(err)};
  }
  if (res->status < 200 || res->status >= 300) {
    return BackendError{BackendErrorKind::HttpFailure, "backend replied with HTTP " + std::to_string(res->status)};
  }
  std::string document = res->body;
  const std::string type = res->get_header_value("Content-Type");
  if (type.find("json") != std::string::npos) {
    auto j = nlohmann::json::parse(res->body, nullptr, false);
    const char* field = j.is_object() && j.contains("mml") ? "mml" : "result";
    if (!j.is_object() || !j.contains(field) || !j[field].is_string()) {
      return BackendError{BackendErrorKind::Malformed, "backend JSON reply has no \"mml\" or \"result\" string"};
    }
    document = j[field].get<std::string>();
  }
  auto parsed = mml::parse_mathml(document);
  if (!parsed) {
    return BackendError{BackendErrorKind::Malformed, "backend reply is not valid MathML: " + parsed.error().message};
  }
  return std::move(parsed.value());
}

}  // namespace

std::optional<std::string> validate(const BackendConfig& config) {
  if (config.timeout_ms <= 0) return "backend timeout must be positive";
  if (config.max_retries < 0) return "backend max-retries must not be negative";
  if (config.backoff_ms < 0) return "backend backoff must not be negative";
  if (config.mode == BackendConfig::Mode::External) {
    if (config.endpoint_url.empty()) return "external backend mode requires an endpoint URL";
    if (!split_url(config.endpoint_url)) return "backend endpoint must be an http:// URL";
  }
  return std::nullopt;
}

std::string_view to_string(BackendErrorKind kind) {
  switch (kind) {
    case BackendErrorKind::Timeout: return "BackendTimeout";
    case BackendErrorKind::Malformed: return "BackendMalformed";
    case BackendErrorKind::HttpFailure: return "BackendHttpFailure";
  }
  return "?";
}

Result<mml::MathNode, BackendError> backend_fetch(std::string_view tex, bool display, const BackendConfig& config,
                                                  FetchTrace* trace) {
  FetchTrace local;
  FetchTrace& t = trace ? *trace : local;
  if (auto problem = validate(config)) return BackendError{BackendErrorKind::HttpFailure, *problem};
  const Endpoint ep = *split_url(config.endpoint_url);
  nlohmann::ordered_json request;
  request["tex"] = std::string(tex);
  request["display"] = display ? "block" : "inline";
  const std::string body = request.dump();

  for (int n = 0;; ++n) {
    ++t.attempts;
    auto result = attempt(ep, body, config);
    if (result) return result;
    const BackendError& e = result.error();
    t.log.push_back("backend attempt " + std::to_string(n + 1) + " failed (" + std::string(to_string(e.kind)) +
                    "): " + e.message);
    if (e.kind == BackendErrorKind::Malformed || n >= config.max_retries) return result;
    const int delay = config.backoff_ms << n;
    t.backoff_ms.push_back(delay);
    t.log.push_back("retrying backend in " + std::to_string(delay) + " ms");
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
  }
}

}  // namespace mathrender::service
