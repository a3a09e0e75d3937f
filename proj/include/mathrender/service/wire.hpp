#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mathrender/mml/emit.hpp"
#include "mathrender/mml/xml.hpp"
#include "mathrender/result.hpp"
#include "mathrender/tex/parse_error.hpp"

namespace mathrender::service {

enum class InputType { Tex, Mml };

struct Formats {
  bool mml = true;
  bool svg = true;
  bool html = true;

  bool operator==(const Formats&) const = default;
};

// JSON body of POST /render:
//   {"q": "...", "type": "tex"|"mml", "formats": ["mml","svg","html"],
//    "options": {"charset": "utf8"|"numeric", "display-style": "inline"|"block"}}
struct RenderRequest {
  std::string q;
  InputType type = InputType::Tex;
  Formats formats;
  mml::Charset charset = mml::Charset::Utf8Literals;
  bool display = false;
};

// One entry of the "errors" array.  Position fields depend on the source:
// TeX errors carry a byte offset, MathML errors a line and column.
struct ErrorRecord {
  std::string code;
  std::string message;
  std::optional<std::size_t> offset;
  std::optional<std::size_t> line;
  std::optional<std::size_t> column;
  std::vector<std::string> offending;
};

ErrorRecord to_record(const tex::ParseError& e);
ErrorRecord to_record(const mml::MathMLParseError& e);

struct RenderResponse {
  bool success = false;
  std::string key;  // cache key, present on success
  std::optional<std::string> mml;
  std::optional<std::string> svg;
  std::optional<std::string> html;
  std::vector<std::string> log;
  std::vector<ErrorRecord> errors;
  bool cache_hit = false;
  std::vector<std::pair<std::string, double>> timing_ms;  // stage name and duration, in order
  std::vector<int> backoff_ms;                             // external backend retry delays
};

struct RequestError {
  int status = 400;
  ErrorRecord error;
};

Result<RenderRequest, RequestError> parse_request(std::string_view body, std::size_t max_q_bytes);

std::string request_to_json(const RenderRequest& request);

// Field order is fixed: success, key, mml, svg, html, log, errors, timing-ms.
std::string to_json(const RenderResponse& response);

// Inverse of to_json for clients and tests; std::nullopt on malformed bodies.
std::optional<RenderResponse> parse_response(std::string_view body);

std::string_view to_string(InputType type);

}  // namespace mathrender::service
