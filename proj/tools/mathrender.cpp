#include <CLI11.hpp>

#include <csignal>
#include <iostream>
#include <iterator>
#include <json.hpp>
#include <string>

#include "mathrender/embedded_data.hpp"
#include "mathrender/harness/harness.hpp"
#include "mathrender/layout/render.hpp"
#include "mathrender/mml/xml.hpp"
#include "mathrender/service/config.hpp"
#include "mathrender/service/fallback.hpp"
#include "mathrender/service/service.hpp"
#include "mathrender/service/wire.hpp"

using namespace mathrender;

namespace {

service::HttpServer* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

std::string read_input(const std::string& arg) {
  if (arg != "-") return arg;
  std::string s((std::istreambuf_iterator<char>(std::cin)), std::istreambuf_iterator<char>());
  while (!s.empty() && (s.back() == '\n' || s.back() == '\r')) s.pop_back();
  return s;
}

int cmd_render(const std::string& formula_arg, const std::string& type, const std::string& format, bool display,
               bool numeric) {
  service::ServiceConfig config;
  config.workers = 1;
  service::Service svc(config);
  service::RenderRequest request;
  request.q = read_input(formula_arg);
  request.type = type == "mml" ? service::InputType::Mml : service::InputType::Tex;
  request.display = display;
  request.charset = numeric ? mml::Charset::NumericReferences : mml::Charset::Utf8Literals;
  const service::RenderOutcome out = svc.submit(request);
  const service::RenderResponse& r = out.response;
  if (format == "json") {
    std::cout << service::to_json(r) << "\n";
    return r.success ? 0 : 1;
  }
  if (!r.success) {
    for (const auto& e : r.errors) {
      std::cerr << e.code << ": " << e.message;
      if (e.offset) std::cerr << " (offset " << *e.offset << ")";
      std::cerr << "\n";
    }
    return 1;
  }
  for (const auto& line : r.log) std::cerr << "warning: " << line << "\n";
  if (format == "mml") std::cout << *r.mml << "\n";
  if (format == "svg") std::cout << *r.svg << "\n";
  if (format == "html") std::cout << *r.html << "\n";
  return 0;
}

int cmd_bench(const std::string& case_spec, std::size_t runs, const std::string& mode, const std::string& url,
              const std::string& baseline, bool display, bool json) {
  harness::BenchOptions options;
  options.runs = runs;
  options.mode = *harness::parse_mode(mode);
  options.url = url;
  options.display = display;
  auto report = harness::bench_run(case_spec, options);
  if (!report) {
    std::cerr << "bench: " << report.error() << "\n";
    return 1;
  }
  if (!baseline.empty()) {
    auto base = harness::bench_run(baseline, options);
    if (!base) {
      std::cerr << "bench baseline: " << base.error() << "\n";
      return 1;
    }
    harness::compare(report.value(), base.value());
  }
  const harness::BenchReport& r = report.value();
  if (json) {
    std::cout << harness::to_json(r) << "\n";
    return 0;
  }
  std::cout << r.case_name << " [" << r.mode << "] cold " << r.cold_ms << " ms, warm median " << r.warm_ms
            << " ms over " << r.runs << " runs" << (r.warm_flagged ? " (warm slower than 1.5x cold)" : "") << "\n";
  for (const auto& [stage, ms] : r.stages) std::cout << "  " << stage << ": " << ms << " ms\n";
  if (r.relative_speed) std::cout << "  relative speed vs " << *r.baseline << ": " << *r.relative_speed << "x\n";
  return 0;
}

int cmd_stress(const std::string& pattern_name, std::size_t depth, bool profile, std::size_t runs, bool json) {
  const auto pattern = *harness::parse_pattern(pattern_name);
  if (!profile) {
    std::cout << harness::gen_stress(depth, pattern) << "\n";
    return 0;
  }
  std::vector<std::size_t> depths;
  for (std::size_t d = 100; d <= depth; d *= 2) depths.push_back(d);
  if (depths.empty() || depths.back() != depth) depths.push_back(depth);
  const harness::StressProfile p = harness::stress_profile(pattern, depths, runs);
  if (json) {
    std::cout << harness::to_json(p) << "\n";
  } else {
    for (const auto& pt : p.points) {
      std::cout << "depth " << pt.depth << ": " << pt.median_ms << " ms" << (pt.ok ? "" : " (failed)") << "\n";
    }
    std::cout << "growth exponent: " << p.exponent << "\n";
  }
  for (const auto& pt : p.points)
    if (!pt.ok) return 1;
  return 0;
}

int cmd_corpus(const std::string& path, bool json) {
  harness::CorpusReport report;
  if (path.empty()) {
    report = harness::run_corpus_text(data::corpus_txt());
  } else {
    auto loaded = harness::run_corpus(path);
    if (!loaded) {
      std::cerr << "corpus: " << loaded.error() << "\n";
      return 2;
    }
    report = std::move(loaded.value());
  }
  std::cout << (json ? harness::to_json(report) : harness::to_text(report)) << (json ? "\n" : "");
  return report.failed == 0 ? 0 : 1;
}

int cmd_serve(const std::string& config_path, std::optional<int> port, std::optional<std::size_t> workers,
              const std::string& host, const std::string& cache_path) {
  service::ServiceConfig config;
  if (!config_path.empty()) {
    auto loaded = service::load_config(config_path);
    if (!loaded) {
      std::cerr << "serve: " << loaded.error() << "\n";
      return 2;
    }
    config = std::move(loaded.value());
  }
  auto env = service::apply_env(config);
  if (!env) {
    std::cerr << "serve: " << env.error() << "\n";
    return 2;
  }
  config = std::move(env.value());
  if (port) config.port = *port;
  if (workers) config.workers = *workers;
  if (!host.empty()) config.host = host;
  if (!cache_path.empty()) config.cache_path = cache_path;
  if (auto problem = service::validate(config)) {
    std::cerr << "serve: " << *problem << "\n";
    return 2;
  }
  service::Service svc(config);
  service::HttpServer server(svc);
  const int bound = server.bind(svc.config().host, svc.config().port);
  if (bound < 0) {
    std::cerr << "serve: cannot bind " << svc.config().host << ":" << svc.config().port << "\n";
    return 1;
  }
  g_server = &server;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "mathrender " << service::kVersion << " listening on http://" << svc.config().host << ":" << bound
            << " with " << svc.config().workers << " workers\n";
  server.run();
  g_server = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"TeX and MathML to MathML + SVG rendering service and tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(service::kVersion));

  std::string formula, type = "tex", format = "svg";
  bool display = false, numeric = false;
  auto* render = app.add_subcommand("render", "Render one formula to stdout");
  render->add_option("formula", formula, "Formula, or - to read stdin")->required();
  render->add_option("--type", type, "Input type")->check(CLI::IsMember({"tex", "mml"}));
  render->add_option("--format", format, "Output")->check(CLI::IsMember({"mml", "svg", "html", "json"}));
  render->add_flag("--display", display, "Display style");
  render->add_flag("--numeric", numeric, "Numeric character references in MathML");

  std::string bench_case, mode = "library", url, baseline;
  std::size_t runs = 10;
  bool json = false;
  auto* bench = app.add_subcommand("bench", "Cold and warm timings for one case");
  bench->add_option("case", bench_case, "Formula, \"sample\" or stress:<pattern>:<depth>")->required();
  bench->add_option("--runs", runs, "Warm runs after the cold one (at least 10)")->check(CLI::Range(10, 100000));
  bench->add_option("--mode", mode, "library, service or http")
      ->check(CLI::IsMember({"library", "service", "http"}));
  bench->add_option("--url", url, "Service URL for http mode, e.g. http://127.0.0.1:10044");
  bench->add_option("--baseline", baseline, "Case to compare against");
  bench->add_flag("--display", display, "Display style");
  bench->add_flag("--json", json, "Machine-readable output");

  std::string pattern = "nested-fraction";
  std::size_t depth = 0, stress_runs = 3;
  bool profile = false;
  auto* stress = app.add_subcommand("stress", "Generate a stress formula, or time a depth sweep");
  stress->add_option("--pattern", pattern, "nested-fraction, nested-script or wide-row")
      ->check(CLI::IsMember({"nested-fraction", "nested-script", "wide-row"}));
  stress->add_option("--depth", depth, "Nesting depth or row width")->required();
  stress->add_flag("--profile", profile, "Render depths 100, 200, ... up to --depth and report timings");
  stress->add_option("--runs", stress_runs, "Runs per depth when profiling");
  stress->add_flag("--json", json, "Machine-readable output");

  std::string corpus_path;
  auto* corpus = app.add_subcommand("corpus", "Coverage run over a corpus file (default: bundled corpus)");
  corpus->add_option("path", corpus_path, "One formula per line, # comments");
  corpus->add_flag("--json", json, "Machine-readable output");

  std::string config_path, host, cache_path;
  std::optional<int> port;
  std::optional<std::size_t> workers;
  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  serve->add_option("--config", config_path, "JSON configuration file");
  serve->add_option("--port", port, "Port (overrides config and MATHRENDER_PORT)");
  serve->add_option("--workers", workers, "Worker threads (overrides config and MATHRENDER_WORKERS)")
      ->check(CLI::PositiveNumber);
  serve->add_option("--host", host, "Bind address");
  serve->add_option("--cache-path", cache_path, "Persistent cache file");

  CLI11_PARSE(app, argc, argv);

  if (*render) return cmd_render(formula, type, format, display, numeric);
  if (*bench) return cmd_bench(bench_case, runs, mode, url, baseline, display, json);
  if (*stress) return cmd_stress(pattern, depth, profile, stress_runs, json);
  if (*corpus) return cmd_corpus(corpus_path, json);
  if (*serve) return cmd_serve(config_path, port, workers, host, cache_path);
  return 0;
}
