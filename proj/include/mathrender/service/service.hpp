#pragma once

#include <chrono>
#include <memory>
#include <string>
#include <string_view>

#include "mathrender/cache/headers.hpp"
#include "mathrender/cache/store.hpp"
#include "mathrender/service/config.hpp"
#include "mathrender/service/renderer.hpp"
#include "mathrender/service/worker_pool.hpp"

namespace mathrender::service {

struct HttpReply {
  int status = 200;
  std::string content_type;
  std::string body;
  cache::HeaderList headers;  // besides Content-Type
};

// Endpoint logic independent of the HTTP transport.  Render work runs on the
// worker pool; the calling thread waits for the result.
class Service {
 public:
  explicit Service(ServiceConfig config);
  ~Service();

  // POST /render
  HttpReply render(std::string_view body, std::string_view content_type);
  // GET /_info
  HttpReply status() const;
  // GET /render/{key}.svg
  HttpReply svg(std::string_view key_hex, std::string_view if_none_match) const;
  // GET /fallback.css
  HttpReply stylesheet() const;

  // Same pipeline as POST /render for an already parsed request; 503 when
  // the queue is full.
  RenderOutcome submit(const RenderRequest& request);

  const ServiceConfig& config() const { return config_; }
  cache::RenderCache& cache() { return *cache_; }
  const WorkerPool& pool() const { return *pool_; }

  // Largest accepted request body.
  std::size_t max_body_bytes() const;

 private:
  ServiceConfig config_;
  std::chrono::steady_clock::time_point started_;
  std::unique_ptr<cache::RenderCache> cache_;
  std::unique_ptr<Renderer> renderer_;
  std::unique_ptr<WorkerPool> pool_;
};

// httplib front end.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Port 0 picks a free port.  Returns the bound port or -1.
  int bind(const std::string& host, int port);
  // Serves until stop(); bind first.
  bool run();
  // run() on a background thread.
  void start();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mathrender::service
