#include "mathrender/service/renderer.hpp"

#include <chrono>
#include <cstdint>

#include "mathrender/budget.hpp"
#include "mathrender/layout/measure.hpp"
#include "mathrender/layout/render.hpp"
#include "mathrender/service/backend.hpp"
#include "mathrender/service/fallback.hpp"
#include "mathrender/tex/parser.hpp"

namespace mathrender::service {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

int status_for(const tex::ParseError& e) {
  switch (e.code) {
    case tex::ParseErrorCode::InputTooLarge: return 413;
    case tex::ParseErrorCode::Timeout: return 504;
    default: return 400;
  }
}

RenderOutcome failure(int status, ErrorRecord error, RenderResponse r = {}) {
  r.success = false;
  r.mml.reset();
  r.svg.reset();
  r.html.reset();
  r.key.clear();
  r.errors.push_back(std::move(error));
  return RenderOutcome{status, std::move(r)};
}

ErrorRecord timeout_record() {
  return ErrorRecord{std::string(tex::to_string(tex::ParseErrorCode::Timeout)),
                     "render budget exhausted during layout", {}, {}, {}, {}};
}

cache::KeyOptions key_options(const RenderRequest& request, const ServiceConfig& config) {
  cache::KeyOptions o{
      {"charset", request.charset == mml::Charset::Utf8Literals ? "utf8" : "numeric"},
      {"display-style", request.display ? "block" : "inline"},
  };
  if (request.type == InputType::Tex) {
    o["backend"] = config.backend.mode == BackendConfig::Mode::External ? "external" : "native";
  }
  return o;
}

// Parsed and normalized input, ready to key.
struct Prepared {
  cache::InputType type;
  std::string normalized;
  mml::MathNode math;  // mml input only
};

void set_display_block(mml::MathNode& math) { math.set("display", "block"); }

constexpr std::size_t kMemoBudgetBytes = 4u << 20;

// Exact request spelling plus every option that enters the key.
std::string spelling_of(const RenderRequest& request, const cache::KeyOptions& options) {
  std::string s(1, request.type == InputType::Tex ? 't' : 'm');
  for (const auto& [name, value] : options) {
    s += name;
    s += '=';
    s += value;
    s += '\n';
  }
  s += request.q;
  return s;
}
void respond(RenderResponse& r, const RenderRequest& request, const cache::CacheKey& key, CachedRender rendered,
             Clock::time_point start) {
  r.success = true;
  r.key = key.hex;
  if (request.formats.mml) r.mml = std::move(rendered.mml);
  if (request.formats.svg) r.svg = std::move(rendered.svg);
  if (request.formats.html) r.html = std::move(rendered.html);
  r.log.insert(r.log.end(), rendered.log.begin(), rendered.log.end());
  r.timing_ms.emplace_back("total", ms_since(start));
}

constexpr std::string_view kPayloadMagic = "MRP1";

void put_u64(std::string& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out += static_cast<char>((v >> shift) & 0xff);
}

bool get_u64(std::string_view& in, std::uint64_t& v) {
  if (in.size() < 8) return false;
  v = 0;
  for (int i = 0; i < 8; ++i) v = (v << 8) | static_cast<unsigned char>(in[i]);
  in.remove_prefix(8);
  return true;
}

void put_field(std::string& out, std::string_view field) {
  put_u64(out, field.size());
  out += field;
}

bool get_field(std::string_view& in, std::string& field) {
  std::uint64_t n = 0;
  if (!get_u64(in, n) || n > in.size()) return false;
  field.assign(in.substr(0, n));
  in.remove_prefix(n);
  return true;
}

}  // namespace

std::string encode_payload(const CachedRender& r) {
  std::string out;
  out.reserve(kPayloadMagic.size() + 40 + r.mml.size() + r.svg.size() + r.html.size());
  out += kPayloadMagic;
  put_field(out, r.mml);
  put_field(out, r.svg);
  put_field(out, r.html);
  put_u64(out, r.log.size());
  for (const auto& line : r.log) put_field(out, line);
  return out;
}

std::optional<CachedRender> decode_payload(std::string_view payload) {
  if (!payload.starts_with(kPayloadMagic)) return std::nullopt;
  payload.remove_prefix(kPayloadMagic.size());
  CachedRender r;
  std::uint64_t lines = 0;
  if (!get_field(payload, r.mml) || !get_field(payload, r.svg) || !get_field(payload, r.html) ||
      !get_u64(payload, lines) || lines > payload.size() / 8) {
    return std::nullopt;
  }
  r.log.resize(lines);
  for (auto& line : r.log) {
    if (!get_field(payload, line)) return std::nullopt;
  }
  if (!payload.empty()) return std::nullopt;
  return r;
}

std::optional<cache::CacheKey> KeyMemo::find(const std::string& spelling) const {
  std::lock_guard lock(mutex_);
  auto it = keys_.find(spelling);
  if (it == keys_.end()) return std::nullopt;
  return it->second;
}

void KeyMemo::remember(std::string spelling, const cache::CacheKey& key) {
  const std::size_t cost = spelling.size() + key.hex.size();
  if (cost > budget_ / 64) return;
  std::lock_guard lock(mutex_);
  if (bytes_ + cost > budget_) {
    keys_.clear();
    bytes_ = 0;
  }
  if (keys_.emplace(std::move(spelling), key).second) bytes_ += cost;
}

Renderer::Renderer(cache::RenderCache& cache, ServiceConfig config)
    : cache_(cache), config_(std::move(config)), memo_(kMemoBudgetBytes) {}

std::optional<cache::CacheKey> Renderer::key_for(const RenderRequest& request) const {
  if (request.type == InputType::Tex) {
    auto ast = tex::parse(request.q, tex::CommandWhitelist::builtin(), config_.limits);
    if (!ast) return std::nullopt;
    return cache::cache_key(cache::InputType::Tex, tex::normalize(ast.value()), key_options(request, config_));
  }
  auto math = mml::parse_mathml(request.q, mml::MathMLLimits{config_.limits.max_input_bytes, config_.limits.max_depth});
  if (!math) return std::nullopt;
  if (request.display) set_display_block(math.value());
  return cache::cache_key(cache::InputType::Mml, mml::serialize_mathml(math.value()), key_options(request, config_));
}

RenderOutcome Renderer::render(const RenderRequest& request) const {
  const auto start = Clock::now();
  Budget budget{std::chrono::milliseconds(config_.request_timeout_ms)};
  RenderResponse r;
  const cache::KeyOptions options = key_options(request, config_);
  std::string spelling = spelling_of(request, options);

  // A spelling seen before maps straight to its key.
  if (auto known = memo_.find(spelling)) {
    if (auto entry = cache_.get(*known)) {
      if (auto rendered = decode_payload(entry->payload)) {
        r.cache_hit = true;
        r.timing_ms.emplace_back("parse", 0.0);
        r.timing_ms.emplace_back("cache-lookup", ms_since(start));
        respond(r, request, *known, std::move(*rendered), start);
        return RenderOutcome{200, std::move(r)};
      }
    }
  }

  // Parse and normalize.
  Prepared prep;
  if (request.type == InputType::Tex) {
    auto ast = tex::parse(request.q, tex::CommandWhitelist::builtin(), config_.limits, &budget);
    if (!ast) return failure(status_for(ast.error()), to_record(ast.error()));
    prep.type = cache::InputType::Tex;
    prep.normalized = tex::normalize(ast.value());
  } else {
    auto math =
        mml::parse_mathml(request.q, mml::MathMLLimits{config_.limits.max_input_bytes, config_.limits.max_depth});
    if (!math) {
      const int status = math.error().code == mml::MathMLErrorCode::InputTooLarge ? 413 : 400;
      return failure(status, to_record(math.error()));
    }
    prep.type = cache::InputType::Mml;
    prep.math = std::move(math.value());
    if (request.display) set_display_block(prep.math);
    prep.normalized = mml::serialize_mathml(prep.math);
  }
  const cache::CacheKey key = cache::cache_key(prep.type, prep.normalized, options);
  r.timing_ms.emplace_back("parse", ms_since(start));

  // Cache lookup.
  const auto lookup_start = Clock::now();
  std::optional<CachedRender> rendered;
  if (auto entry = cache_.get(key)) {
    rendered = decode_payload(entry->payload);
    r.cache_hit = rendered.has_value();
  }
  r.timing_ms.emplace_back("cache-lookup", ms_since(lookup_start));

  if (!rendered) {
    const auto render_start = Clock::now();
    CachedRender out;
    layout::SvgDocument svg;
    bool native_tex = prep.type == cache::InputType::Tex && config_.backend.mode == BackendConfig::Mode::Native;

    if (prep.type == cache::InputType::Tex && !native_tex) {
      FetchTrace trace;
      auto fetched = backend_fetch(prep.normalized, request.display, config_.backend, &trace);
      r.backoff_ms = trace.backoff_ms;
      r.log.insert(r.log.end(), trace.log.begin(), trace.log.end());
      if (fetched) {
        prep.math = std::move(fetched.value());
      } else if (config_.backend.fallback_native) {
        r.log.push_back("external backend unavailable; rendered natively");
        native_tex = true;
      } else {
        const BackendError& e = fetched.error();
        const int status = e.kind == BackendErrorKind::Timeout ? 504 : 502;
        r.timing_ms.emplace_back("render", ms_since(render_start));
        r.timing_ms.emplace_back("total", ms_since(start));
        return failure(status, ErrorRecord{std::string(to_string(e.kind)), e.message, {}, {}, {}, {}},
                       std::move(r));
      }
    }

    if (native_tex) {
      layout::RenderOptions opts;
      opts.charset = request.charset;
      opts.display = request.display;
      opts.limits = config_.limits;
      opts.limits.max_input_bytes = std::max(opts.limits.max_input_bytes, prep.normalized.size());
      opts.budget = &budget;
      auto done = layout::render_tex_to_svg(prep.normalized, opts);
      if (!done) return failure(status_for(done.error()), to_record(done.error()), std::move(r));
      out.mml = mml::serialize_mathml(done->mathml);
      svg = std::move(done->svg);
      out.log = std::move(done->log);
    } else {
      try {
        svg = layout::render_mathml_to_svg(prep.math, &out.log, &budget);
      } catch (const layout::LayoutAborted&) {
        return failure(504, timeout_record(), std::move(r));
      }
      out.mml = mml::serialize_mathml(prep.math);
    }
    out.html = compose_fallback_html(out.mml, svg, request.display);
    out.svg = std::move(svg.body);
    r.timing_ms.emplace_back("render", ms_since(render_start));
    std::string payload = encode_payload(out);
    cache_.put(key, std::move(payload));
    rendered = std::move(out);
  }

  memo_.remember(std::move(spelling), key);
  respond(r, request, key, std::move(*rendered), start);
  return RenderOutcome{200, std::move(r)};
}

}  // namespace mathrender::service
