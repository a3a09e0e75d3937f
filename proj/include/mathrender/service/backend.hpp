#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mathrender/mml/math_node.hpp"
#include "mathrender/result.hpp"

namespace mathrender::service {

struct BackendConfig {
  enum class Mode { Native, External };
  Mode mode = Mode::Native;
  std::string endpoint_url;  // http://host:port/path
  int timeout_ms = 2000;
  int max_retries = 2;        // attempts = max_retries + 1
  int backoff_ms = 100;       // delay before retry n is backoff_ms * 2^(n-1)
  bool fallback_native = false;
};

// Error message when the configuration is unusable.
std::optional<std::string> validate(const BackendConfig& config);

enum class BackendErrorKind { Timeout, Malformed, HttpFailure };

std::string_view to_string(BackendErrorKind kind);

struct BackendError {
  BackendErrorKind kind;
  std::string message;
};

// Attempts, retry delays and log lines of one backend_fetch call.
struct FetchTrace {
  int attempts = 0;
  std::vector<int> backoff_ms;
  std::vector<std::string> log;
};

// Posts {"tex": ..., "display": "inline"|"block"} to the endpoint.  The reply
// is either a MathML document or a JSON object carrying it in "mml" or
// "result"; it must pass parse_mathml.  Timeouts and transport or 5xx
// failures are retried; malformed replies are not.
Result<mml::MathNode, BackendError> backend_fetch(std::string_view tex, bool display, const BackendConfig& config,
                                                  FetchTrace* trace = nullptr);

}  // namespace mathrender::service
