#include "mathrender/service/wire.hpp"

#include <json.hpp>

namespace mathrender::service {
namespace {

using Json = nlohmann::ordered_json;

RequestError bad(std::string message, int status = 400) {
  return RequestError{status, ErrorRecord{"BadRequest", std::move(message), {}, {}, {}, {}}};
}

bool blank(std::string_view s) {
  for (char c : s) {
    if (c != ' ' && c != '\t' && c != '\n' && c != '\r') return false;
  }
  return true;
}

Json record_json(const ErrorRecord& e) {
  Json j;
  j["code"] = e.code;
  j["message"] = e.message;
  if (e.offset) j["offset"] = *e.offset;
  if (e.line) j["line"] = *e.line;
  if (e.column) j["column"] = *e.column;
  if (!e.offending.empty()) j["offending"] = e.offending;
  return j;
}

}  // namespace

std::string_view to_string(InputType type) { return type == InputType::Tex ? "tex" : "mml"; }

ErrorRecord to_record(const tex::ParseError& e) {
  return ErrorRecord{std::string(tex::to_string(e.code)), e.message, e.offset, {}, {}, e.offending};
}

ErrorRecord to_record(const mml::MathMLParseError& e) {
  return ErrorRecord{std::string(mml::to_string(e.code)), e.message, {}, e.line, e.column, {}};
}

Result<RenderRequest, RequestError> parse_request(std::string_view body, std::size_t max_q_bytes) {
  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded()) return bad("request body is not valid UTF-8 JSON");
  if (!j.is_object()) return bad("request body must be a JSON object");

  RenderRequest r;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& name = it.key();
    const Json& v = it.value();
    if (name == "q") {
      if (!v.is_string()) return bad("\"q\" must be a string");
      r.q = v.get<std::string>();
    } else if (name == "type") {
      if (v == "tex") {
        r.type = InputType::Tex;
      } else if (v == "mml") {
        r.type = InputType::Mml;
      } else {
        return bad("\"type\" must be \"tex\" or \"mml\"");
      }
    } else if (name == "formats") {
      if (!v.is_array() || v.empty()) return bad("\"formats\" must be a nonempty array");
      r.formats = Formats{false, false, false};
      for (const Json& f : v) {
        if (f == "mml") {
          r.formats.mml = true;
        } else if (f == "svg") {
          r.formats.svg = true;
        } else if (f == "html") {
          r.formats.html = true;
        } else {
          return bad("unknown format " + f.dump() + "; expected mml, svg or html");
        }
      }
    } else if (name == "options") {
      if (!v.is_object()) return bad("\"options\" must be an object");
      for (auto o = v.begin(); o != v.end(); ++o) {
        if (o.key() == "charset") {
          if (o.value() == "utf8") {
            r.charset = mml::Charset::Utf8Literals;
          } else if (o.value() == "numeric") {
            r.charset = mml::Charset::NumericReferences;
          } else {
            return bad("\"charset\" must be \"utf8\" or \"numeric\"");
          }
        } else if (o.key() == "display-style") {
          if (o.value() == "inline") {
            r.display = false;
          } else if (o.value() == "block") {
            r.display = true;
          } else {
            return bad("\"display-style\" must be \"inline\" or \"block\"");
          }
        } else {
          return bad("unknown option \"" + o.key() + "\"");
        }
      }
    } else {
      return bad("unknown field \"" + name + "\"");
    }
  }
  if (!j.contains("q")) return bad("missing field \"q\"");
  if (r.q.size() > max_q_bytes) {
    return RequestError{413, ErrorRecord{"InputTooLarge",
                                         "input is " + std::to_string(r.q.size()) + " bytes; limit is " +
                                             std::to_string(max_q_bytes),
                                         {}, {}, {}, {}}};
  }
  if (blank(r.q)) return bad("\"q\" is empty");
  return r;
}

std::string request_to_json(const RenderRequest& request) {
  Json j;
  j["q"] = request.q;
  j["type"] = to_string(request.type);
  Json formats = Json::array();
  if (request.formats.mml) formats.push_back("mml");
  if (request.formats.svg) formats.push_back("svg");
  if (request.formats.html) formats.push_back("html");
  j["formats"] = formats;
  j["options"]["charset"] = request.charset == mml::Charset::Utf8Literals ? "utf8" : "numeric";
  j["options"]["display-style"] = request.display ? "block" : "inline";
  return j.dump();
}

std::string to_json(const RenderResponse& response) {
  Json j;
  j["success"] = response.success;
  if (!response.key.empty()) j["key"] = response.key;
  if (response.mml) j["mml"] = *response.mml;
  if (response.svg) j["svg"] = *response.svg;
  if (response.html) j["html"] = *response.html;
  j["log"] = response.log;
  j["errors"] = Json::array();
  for (const ErrorRecord& e : response.errors) j["errors"].push_back(record_json(e));
  Json timing = Json::object();
  timing["cache-hit"] = response.cache_hit;
  for (const auto& [stage, ms] : response.timing_ms) timing[stage] = ms;
  if (!response.backoff_ms.empty()) timing["backoff"] = response.backoff_ms;
  j["timing-ms"] = timing;
  return j.dump();
}

std::optional<RenderResponse> parse_response(std::string_view body) {
  Json j = Json::parse(body.begin(), body.end(), nullptr, false);
  if (j.is_discarded() || !j.is_object()) return std::nullopt;
  try {
    RenderResponse r;
    r.success = j.at("success").get<bool>();
    if (j.contains("key")) r.key = j["key"].get<std::string>();
    if (j.contains("mml")) r.mml = j["mml"].get<std::string>();
    if (j.contains("svg")) r.svg = j["svg"].get<std::string>();
    if (j.contains("html")) r.html = j["html"].get<std::string>();
    r.log = j.at("log").get<std::vector<std::string>>();
    for (const Json& e : j.at("errors")) {
      ErrorRecord rec;
      rec.code = e.at("code").get<std::string>();
      rec.message = e.at("message").get<std::string>();
      if (e.contains("offset")) rec.offset = e["offset"].get<std::size_t>();
      if (e.contains("line")) rec.line = e["line"].get<std::size_t>();
      if (e.contains("column")) rec.column = e["column"].get<std::size_t>();
      if (e.contains("offending")) rec.offending = e["offending"].get<std::vector<std::string>>();
      r.errors.push_back(std::move(rec));
    }
    const Json& timing = j.at("timing-ms");
    for (auto it = timing.begin(); it != timing.end(); ++it) {
      if (it.key() == "cache-hit") {
        r.cache_hit = it.value().get<bool>();
      } else if (it.key() == "backoff") {
        r.backoff_ms = it.value().get<std::vector<int>>();
      } else {
        r.timing_ms.emplace_back(it.key(), it.value().get<double>());
      }
    }
    return r;
  } catch (const nlohmann::json::exception&) {
    return std::nullopt;
  }
}

}  // namespace mathrender::service
