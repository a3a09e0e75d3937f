#include "mathrender/service/service.hpp"

#include <httplib.h>

#include <cctype>
#include <future>
#include <json.hpp>
#include <thread>

#include "mathrender/embedded_data.hpp"

namespace mathrender::service {
namespace {

constexpr std::string_view kJsonType = "application/json; charset=utf-8";

HttpReply error_reply(int status, std::string code, std::string message) {
  RenderResponse r;
  r.errors.push_back(ErrorRecord{std::move(code), std::move(message), {}, {}, {}, {}});
  return HttpReply{status, std::string(kJsonType), to_json(r), {{"Cache-Control", "no-store"}}};
}

bool is_json_type(std::string_view type) {
  const std::size_t semi = type.find(';');
  std::string_view media = type.substr(0, semi);
  while (!media.empty() && media.back() == ' ') media.remove_suffix(1);
  while (!media.empty() && media.front() == ' ') media.remove_prefix(1);
  constexpr std::string_view expected = "application/json";
  if (media.size() != expected.size()) return false;
  for (std::size_t i = 0; i < media.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(media[i])) != expected[i]) return false;
  }
  return true;
}

}  // namespace

Service::Service(ServiceConfig config)
    : config_(config.resolved()),
      started_(std::chrono::steady_clock::now()),
      cache_(std::make_unique<cache::RenderCache>(
          cache::CacheConfig{config_.cache_budget_bytes, config_.cache_path})),
      renderer_(std::make_unique<Renderer>(*cache_, config_)),
      pool_(std::make_unique<WorkerPool>(config_.workers, config_.queue_bound)) {}

Service::~Service() { pool_.reset(); }

std::size_t Service::max_body_bytes() const {
  // A JSON string escape can take six bytes per input byte.
  return config_.limits.max_input_bytes * 6 + 4096;
}

RenderOutcome Service::submit(const RenderRequest& request) {
  auto promise = std::make_shared<std::promise<RenderOutcome>>();
  std::future<RenderOutcome> result = promise->get_future();
  const Renderer* renderer = renderer_.get();
  const bool accepted = pool_->try_post([promise, renderer, request] {
    try {
      promise->set_value(renderer->render(request));
    } catch (const std::exception& e) {
      RenderResponse r;
      r.errors.push_back(ErrorRecord{"InternalError", e.what(), {}, {}, {}, {}});
      promise->set_value(RenderOutcome{500, std::move(r)});
    }
  });
  if (!accepted) {
    RenderResponse r;
    r.errors.push_back(ErrorRecord{"Overloaded",
                                   "render queue is full (" + std::to_string(pool_->queue_bound()) +
                                       " waiting); retry later",
                                   {}, {}, {}, {}});
    return RenderOutcome{503, std::move(r)};
  }
  return result.get();
}

HttpReply Service::render(std::string_view body, std::string_view content_type) {
  if (!is_json_type(content_type)) {
    return error_reply(415, "UnsupportedMediaType", "request content type must be application/json");
  }
  if (body.size() > max_body_bytes()) {
    return error_reply(413, "InputTooLarge",
                       "request body is " + std::to_string(body.size()) + " bytes; limit is " +
                           std::to_string(max_body_bytes()));
  }
  auto request = parse_request(body, config_.limits.max_input_bytes);
  if (!request) {
    const RequestError& e = request.error();
    return error_reply(e.status, e.error.code, e.error.message);
  }
  RenderOutcome outcome = submit(request.value());
  HttpReply reply{outcome.status, std::string(kJsonType), to_json(outcome.response), {}};
  if (outcome.status == 200) {
    for (auto& [name, value] : cache::cache_headers(cache::CacheKey{outcome.response.key}, cache::BodyFormat::Json)) {
      if (name != "Content-Type") reply.headers.emplace_back(name, value);
    }
  } else {
    reply.headers.emplace_back("Cache-Control", "no-store");
    if (outcome.status == 503) reply.headers.emplace_back("Retry-After", "1");
  }
  return reply;
}

HttpReply Service::status() const {
  const cache::CacheStats s = cache_->stats();
  nlohmann::ordered_json j;
  j["version"] = kVersion;
  j["uptime-s"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
  j["workers"] = pool_->workers();
  j["queue-bound"] = pool_->queue_bound();
  j["queue-depth"] = pool_->queue_depth();
  j["busy-workers"] = pool_->busy();
  j["rejected"] = pool_->rejected();
  j["backend"] = config_.backend.mode == BackendConfig::Mode::External ? "external" : "native";
  j["cache"] = {{"hits", s.hits},
                {"misses", s.misses},
                {"evictions", s.evictions},
                {"entries", s.entries},
                {"bytes", s.bytes},
                {"budget-bytes", s.budget_bytes},
                {"persistent", !config_.cache_path.empty()},
                {"disk-write-failures", s.disk_write_failures}};
  return HttpReply{200, std::string(kJsonType), j.dump(), {{"Cache-Control", "no-store"}}};
}

HttpReply Service::svg(std::string_view key_hex, std::string_view if_none_match) const {
  if (!cache::is_valid_key(key_hex)) return error_reply(404, "NotFound", "not a render key");
  const cache::CacheKey key{std::string(key_hex)};
  auto headers = cache::cache_headers(key, cache::BodyFormat::Svg);
  std::erase_if(headers, [](const auto& h) { return h.first == "Content-Type"; });
  // The key addresses immutable content, so a matching validator stays valid
  // even after eviction.
  if (!if_none_match.empty() && cache::matches_if_none_match(if_none_match, key)) {
    return HttpReply{304, "", "", headers};
  }
  auto entry = cache_->get(key);
  std::optional<CachedRender> rendered;
  if (entry) rendered = decode_payload(entry->payload);
  if (!rendered) return error_reply(404, "NotFound", "no cached render for this key; POST /render first");
  return HttpReply{200, std::string(cache::content_type(cache::BodyFormat::Svg)), std::move(rendered->svg),
                   headers};
}

HttpReply Service::stylesheet() const {
  return HttpReply{200, std::string(cache::content_type(cache::BodyFormat::Css)), std::string(data::fallback_css()),
                   {{"Cache-Control", "public, max-age=86400"}}};
}

struct HttpServer::Impl {
  Service& service;
  httplib::Server server;
  std::thread thread;

  explicit Impl(Service& s) : service(s) {}
};

namespace {

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  for (const auto& [name, value] : reply.headers) res.set_header(name, value);
  if (!reply.content_type.empty()) {
    res.set_content(reply.body, reply.content_type);
  } else if (!reply.body.empty()) {
    res.body = reply.body;
  }
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
  httplib::Server& svr = impl_->server;
  Service& s = impl_->service;
  const ServiceConfig& c = s.config();
  // Enough connection threads that the render queue, not the acceptor, is
  // what limits concurrency.
  const std::size_t threads = c.workers + c.queue_bound + 8;
  svr.new_task_queue = [threads] { return new httplib::ThreadPool(threads); };
  svr.set_payload_max_length(s.max_body_bytes());

  svr.Post("/render", [&s](const httplib::Request& req, httplib::Response& res) {
    send(res, s.render(req.body, req.get_header_value("Content-Type")));
  });
  svr.Get("/_info", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.status()); });
  svr.Get(R"(/render/([0-9a-f]{64})\.svg)", [&s](const httplib::Request& req, httplib::Response& res) {
    send(res, s.svg(req.matches[1].str(), req.get_header_value("If-None-Match")));
  });
  svr.Get("/fallback.css", [&s](const httplib::Request&, httplib::Response& res) { send(res, s.stylesheet()); });
  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    send(res, error_reply(500, "InternalError", "unhandled exception"));
  });
  svr.set_error_handler([](const httplib::Request&, httplib::Response& res) {
    if (!res.body.empty()) return;
    const int status = res.status;
    send(res, error_reply(status, status == 413 ? "InputTooLarge" : status == 404 ? "NotFound" : "HttpError",
                          "HTTP " + std::to_string(status)));
  });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return impl_->server.bind_to_any_port(host);
  return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return impl_->server.listen_after_bind(); }

void HttpServer::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace mathrender::service
