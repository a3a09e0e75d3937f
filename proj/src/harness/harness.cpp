#include "mathrender/harness/harness.hpp"

#include <httplib.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <iterator>
#include <json.hpp>
#include <set>
#include <sstream>

#include "mathrender/layout/measure.hpp"
#include "mathrender/layout/render.hpp"
#include "mathrender/layout/svg.hpp"
#include "mathrender/mml/emit.hpp"
#include "mathrender/mml/xml.hpp"
#include "mathrender/service/service.hpp"
#include "mathrender/service/wire.hpp"
#include "mathrender/tex/lexer.hpp"
#include "mathrender/tex/parser.hpp"
#include "mathrender/tex/whitelist.hpp"

namespace mathrender::harness {
namespace {

using Clock = std::chrono::steady_clock;
using Json = nlohmann::ordered_json;

double ms_since(Clock::time_point t) { return std::chrono::duration<double, std::milli>(Clock::now() - t).count(); }

double median(std::vector<double> v) {
  if (v.empty()) return 0;
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
}

// Per-stage timings of one full native render.
struct StageTimes {
  double parse = 0, mathml = 0, layout = 0, svg = 0;
  bool ok = false;
  std::string error;
};

StageTimes timed_render(std::string_view formula, bool display) {
  StageTimes t;
  const auto& wl = tex::CommandWhitelist::builtin();
  Limits limits;
  limits.max_input_bytes = std::max(limits.max_input_bytes, formula.size());
  auto t0 = Clock::now();
  auto ast = tex::parse(formula, wl, limits);
  t.parse = ms_since(t0);
  if (!ast) {
    t.error = std::string(tex::to_string(ast.error().code)) + ": " + ast.error().message;
    return t;
  }
  t0 = Clock::now();
  mml::EmitOptions emit;
  emit.display = display;
  const mml::MathNode math = mml::emit_mathml(tex::expand_semantic_macros(ast.value(), wl), emit);
  const std::string text = mml::serialize_mathml(math);
  t.mathml = ms_since(t0);
  t0 = Clock::now();
  layout::LayoutBox box = layout::LayoutEngine().measure(math);
  t.layout = ms_since(t0);
  t0 = Clock::now();
  const layout::SvgDocument svg = layout::emit_svg(box);
  t.svg = ms_since(t0);
  layout::dispose(std::move(box));
  t.ok = !text.empty() && !svg.body.empty();
  return t;
}

// Median of each named timing across responses.
std::vector<std::pair<std::string, double>> median_stages(
    const std::vector<std::vector<std::pair<std::string, double>>>& all) {
  std::vector<std::pair<std::string, double>> out;
  if (all.empty()) return out;
  for (const auto& [name, unused] : all.front()) {
    std::vector<double> values;
    for (const auto& one : all) {
      for (const auto& [n, v] : one)
        if (n == name) values.push_back(v);
    }
    out.emplace_back(name, median(values));
  }
  return out;
}

std::size_t skip_group_name(const std::vector<tex::Token>& tokens, std::size_t i, std::string& name) {
  // tokens[i] is "\begin" or "\end"; read "{" name "}".
  std::size_t j = i + 1;
  while (j < tokens.size() && tokens[j].kind == tex::TokenKind::Whitespace) ++j;
  if (j >= tokens.size() || tokens[j].kind != tex::TokenKind::OpenBrace) return i;
  std::string text;
  std::size_t k = j + 1;
  for (; k < tokens.size() && tokens[k].kind != tex::TokenKind::CloseBrace; ++k) text += tokens[k].text;
  if (k >= tokens.size()) return i;
  name = text;
  return k;
}

}  // namespace

std::optional<StressPattern> parse_pattern(std::string_view name) {
  if (name == "nested-fraction") return StressPattern::NestedFraction;
  if (name == "nested-script") return StressPattern::NestedScript;
  if (name == "wide-row") return StressPattern::WideRow;
  return std::nullopt;
}

std::string_view to_string(StressPattern p) {
  switch (p) {
    case StressPattern::NestedFraction: return "nested-fraction";
    case StressPattern::NestedScript: return "nested-script";
    case StressPattern::WideRow: return "wide-row";
  }
  return "?";
}

std::string gen_stress(std::size_t depth, StressPattern pattern) {
  std::string out;
  switch (pattern) {
    case StressPattern::NestedFraction:
      // \frac{x}{ ... x ... }
      out.reserve(depth * 10 + 1);
      for (std::size_t i = 0; i < depth; ++i) out += "\\frac{x}{";
      out += 'x';
      out.append(depth, '}');
      break;
    case StressPattern::NestedScript:
      out.reserve(depth * 4 + 1);
      for (std::size_t i = 0; i < depth; ++i) out += "x^{";
      out += 'x';
      out.append(depth, '}');
      break;
    case StressPattern::WideRow:
      out.assign(depth, 'x');
      break;
  }
  return out;
}

std::string resolve_case(std::string_view spec) {
  if (spec == "sample") return std::string(kSampleEquation);
  constexpr std::string_view prefix = "stress:";
  if (spec.substr(0, prefix.size()) == prefix) {
    const std::string_view rest = spec.substr(prefix.size());
    const std::size_t colon = rest.rfind(':');
    if (colon != std::string_view::npos) {
      auto pattern = parse_pattern(rest.substr(0, colon));
      const std::string digits(rest.substr(colon + 1));
      if (pattern && !digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
        return gen_stress(std::stoul(digits), *pattern);
      }
    }
  }
  return std::string(spec);
}

std::optional<BenchMode> parse_mode(std::string_view name) {
  if (name == "library") return BenchMode::Library;
  if (name == "service") return BenchMode::Service;
  if (name == "http") return BenchMode::Http;
  return std::nullopt;
}

std::string_view to_string(BenchMode m) {
  switch (m) {
    case BenchMode::Library: return "library";
    case BenchMode::Service: return "service";
    case BenchMode::Http: return "http";
  }
  return "?";
}

Result<BenchReport, std::string> bench_run(std::string_view case_spec, const BenchOptions& options) {
  if (options.runs < 10) return std::string("runs must be at least 10");
  const std::string formula = resolve_case(case_spec);
  BenchReport report;
  report.case_name = std::string(case_spec.size() > 80 ? case_spec.substr(0, 77) : case_spec);
  if (case_spec.size() > 80) report.case_name += "...";
  report.mode = std::string(to_string(options.mode));
  report.runs = options.runs;

  {
    Limits limits;
    limits.max_input_bytes = std::max(limits.max_input_bytes, formula.size());
    auto ast = tex::parse(formula, tex::CommandWhitelist::builtin(), limits);
    if (!ast) return "case does not parse: " + ast.error().message;
  }

  std::vector<double> warm;
  if (options.mode == BenchMode::Library) {
    std::vector<std::vector<std::pair<std::string, double>>> stages;
    for (std::size_t i = 0; i <= options.runs; ++i) {
      const auto t0 = Clock::now();
      const StageTimes t = timed_render(formula, options.display);
      const double total = ms_since(t0);
      if (!t.ok) return "render failed: " + t.error;
      if (i == 0) {
        report.cold_ms = total;
      } else {
        warm.push_back(total);
        stages.push_back({{"parse", t.parse}, {"mathml", t.mathml}, {"layout", t.layout}, {"svg", t.svg}});
      }
    }
    report.stages = median_stages(stages);
  } else {
    service::RenderRequest request;
    request.q = formula;
    request.display = options.display;
    const std::string body = service::request_to_json(request);

    std::unique_ptr<service::Service> local;
    std::unique_ptr<httplib::Client> client;
    if (options.mode == BenchMode::Service) {
      service::ServiceConfig config;
      config.workers = 1;
      config.limits.max_input_bytes = std::max(config.limits.max_input_bytes, formula.size());
      config.request_timeout_ms = 60000;
      local = std::make_unique<service::Service>(config);
    } else {
      if (options.url.empty()) return std::string("http mode needs a service URL");
      client = std::make_unique<httplib::Client>(options.url);
      client->set_read_timeout(std::chrono::seconds(60));
    }

    std::vector<std::vector<std::pair<std::string, double>>> stages;
    for (std::size_t i = 0; i <= options.runs; ++i) {
      const auto t0 = Clock::now();
      std::string reply;
      int status = 0;
      if (local) {
        service::HttpReply r = local->render(body, "application/json");
        status = r.status;
        reply = std::move(r.body);
      } else {
        auto r = client->Post("/render", body, "application/json");
        if (!r) return "service unreachable at " + options.url + ": " + httplib::to_string(r.error());
        status = r->status;
        reply = std::move(r->body);
      }
      const double total = ms_since(t0);
      auto parsed = service::parse_response(reply);
      if (status != 200 || !parsed || !parsed->success) {
        return "service returned HTTP " + std::to_string(status) +
               (parsed && !parsed->errors.empty() ? ": " + parsed->errors.front().message : std::string());
      }
      if (i == 0) {
        report.cold_ms = total;
      } else {
        warm.push_back(total);
        stages.push_back(parsed->timing_ms);
      }
    }
    report.stages = median_stages(stages);
  }
  report.warm_ms = median(warm);
  report.warm_flagged = report.warm_ms > 1.5 * report.cold_ms;
  return report;
}

void compare(BenchReport& report, const BenchReport& baseline) {
  report.baseline = baseline.case_name + " (" + baseline.mode + ")";
  report.relative_speed = report.warm_ms > 0 ? baseline.warm_ms / report.warm_ms : 0.0;
}

std::string to_json(const BenchReport& r) {
  Json j;
  j["case"] = r.case_name;
  j["mode"] = r.mode;
  j["runs"] = r.runs;
  j["cold-ms"] = r.cold_ms;
  j["warm-ms"] = r.warm_ms;
  j["stages"] = Json::object();
  for (const auto& [name, ms] : r.stages) j["stages"][name] = ms;
  j["warm-flagged"] = r.warm_flagged;
  if (r.baseline) j["baseline"] = *r.baseline;
  if (r.relative_speed) j["relative-speed"] = *r.relative_speed;
  return j.dump(2);
}

StressProfile stress_profile(StressPattern pattern, const std::vector<std::size_t>& depths, std::size_t runs) {
  StressProfile p;
  p.pattern = pattern;
  for (std::size_t d : depths) {
    const std::string formula = gen_stress(d, pattern);
    layout::RenderOptions opts;
    opts.limits.max_input_bytes = std::max(opts.limits.max_input_bytes, formula.size());
    std::vector<double> times;
    bool ok = true;
    for (std::size_t i = 0; i < std::max<std::size_t>(runs, 1); ++i) {
      const auto t0 = Clock::now();
      auto r = layout::render_tex_to_svg(formula, opts);
      times.push_back(ms_since(t0));
      ok = ok && r.ok();
    }
    p.points.push_back(StressPoint{d, median(times), ok});
  }
  // Least-squares slope in log-log space.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n = 0;
  for (const StressPoint& pt : p.points) {
    if (pt.depth == 0 || pt.median_ms <= 0) continue;
    const double x = std::log(static_cast<double>(pt.depth));
    const double y = std::log(pt.median_ms);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  const double denom = static_cast<double>(n) * sxx - sx * sx;
  p.exponent = n >= 2 && denom != 0 ? (static_cast<double>(n) * sxy - sx * sy) / denom : 0;
  return p;
}

std::string to_json(const StressProfile& p) {
  Json j;
  j["pattern"] = to_string(p.pattern);
  j["points"] = Json::array();
  for (const StressPoint& pt : p.points) {
    j["points"].push_back({{"depth", pt.depth}, {"median-ms", pt.median_ms}, {"ok", pt.ok}});
  }
  j["exponent"] = p.exponent;
  return j.dump(2);
}

CorpusReport run_corpus_text(std::string_view text) {
  const auto start = Clock::now();
  CorpusReport report;
  const auto& wl = tex::CommandWhitelist::builtin();
  std::set<std::string> unknown;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    const bool blank = line.find_first_not_of(" \t") == std::string_view::npos;
    if (blank || line.front() == '#') {
      if (end == text.size()) break;
      continue;
    }

    FormulaResult result;
    result.line = line_no;
    result.formula = std::string(line);

    if (auto tokens = tex::tokenize(line)) {
      const auto& toks = tokens.value();
      for (std::size_t i = 0; i < toks.size(); ++i) {
        if (toks[i].kind != tex::TokenKind::Command) continue;
        const std::string& name = toks[i].text;
        ++report.command_counts[name];
        if (const auto* entry = wl.find(name)) ++report.category_counts[std::string(tex::to_string(entry->category))];
        if (name == "\\begin") {
          std::string env;
          i = skip_group_name(toks, i, env);
          if (!env.empty()) {
            ++report.command_counts[env];
            if (const auto* entry = wl.find(env)) {
              ++report.category_counts[std::string(tex::to_string(entry->category))];
            }
          }
        }
      }
    }

    auto rendered = layout::render_tex_to_svg(line);
    if (rendered) {
      result.ok = !mml::serialize_mathml(rendered->mathml).empty() && !rendered->svg.body.empty();
      if (!result.ok) result.error_message = "empty output";
    } else {
      const tex::ParseError& e = rendered.error();
      result.error_code = std::string(tex::to_string(e.code));
      result.error_message = e.message;
      result.offending = e.offending;
      if (e.code == tex::ParseErrorCode::UnknownCommand) unknown.insert(e.offending.begin(), e.offending.end());
    }
    (result.ok ? report.passed : report.failed) += 1;
    report.formulas.push_back(std::move(result));
    if (end == text.size()) break;
  }
  report.unknown_commands.assign(unknown.begin(), unknown.end());
  report.elapsed_ms = ms_since(start);
  return report;
}

Result<CorpusReport, std::string> run_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot read corpus file " + path.string();
  const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) return "error reading corpus file " + path.string();
  return run_corpus_text(text);
}

std::string to_json(const CorpusReport& r) {
  Json j;
  j["total"] = r.formulas.size();
  j["passed"] = r.passed;
  j["failed"] = r.failed;
  j["elapsed-ms"] = r.elapsed_ms;
  j["formulas"] = Json::array();
  for (const FormulaResult& f : r.formulas) {
    Json e;
    e["line"] = f.line;
    e["formula"] = f.formula;
    e["ok"] = f.ok;
    if (!f.ok) {
      e["error"] = f.error_code;
      e["message"] = f.error_message;
      if (!f.offending.empty()) e["offending"] = f.offending;
    }
    j["formulas"].push_back(std::move(e));
  }
  j["commands"] = r.command_counts;
  j["categories"] = r.category_counts;
  j["unknown-commands"] = r.unknown_commands;
  return j.dump(2);
}

std::string to_text(const CorpusReport& r) {
  std::ostringstream out;
  out << r.passed << "/" << r.formulas.size() << " formulas rendered";
  if (r.failed) out << ", " << r.failed << " failed";
  out << "\n";
  for (const FormulaResult& f : r.formulas) {
    if (f.ok) continue;
    out << "  line " << f.line << ": " << f.error_code << ": " << f.error_message << "\n    " << f.formula << "\n";
  }
  if (!r.unknown_commands.empty()) {
    out << "commands not in the whitelist:";
    for (const auto& c : r.unknown_commands) out << ' ' << c;
    out << "\n";
  }
  out << "categories:";
  for (const auto& [c, n] : r.category_counts) out << ' ' << c << '=' << n;
  out << "\ndistinct commands: " << r.command_counts.size() << "\n";
  return out.str();
}

}  // namespace mathrender::harness
