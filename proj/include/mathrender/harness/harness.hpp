#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mathrender/result.hpp"

namespace mathrender::harness {

// Deep-nesting generators standing in for pathological inputs.
enum class StressPattern { NestedFraction, NestedScript, WideRow };

std::optional<StressPattern> parse_pattern(std::string_view name);
std::string_view to_string(StressPattern p);

// nested-fraction: "x", "\frac{x}{x}", "\frac{x}{\frac{x}{x}}", ...
// nested-script:   "x", "x^{x}", "x^{x^{x}}", ...
// wide-row:        depth copies of "x", a row of exactly depth items ("" for 0).
std::string gen_stress(std::size_t depth, StressPattern pattern);

// The equation used throughout the benchmarks (hyperbola in standard form).
inline constexpr std::string_view kSampleEquation = "{\\frac{(x-h)^{2}}{a^{2}}}-{\\frac{(y-k)^{2}}{b^{2}}}=1";

// "sample" names the sample equation, "stress:<pattern>:<depth>" a generated
// case; anything else is taken as a literal formula.
std::string resolve_case(std::string_view spec);

enum class BenchMode {
  Library,  // full pipeline per run, no cache
  Service,  // in-process service with its cache
  Http,     // POST /render against a running service
};

std::optional<BenchMode> parse_mode(std::string_view name);
std::string_view to_string(BenchMode m);

struct BenchOptions {
  std::size_t runs = 10;  // warm runs after the cold one; at least 10
  BenchMode mode = BenchMode::Library;
  std::string url;        // Http mode: http://host:port
  bool display = false;
};

struct BenchReport {
  std::string case_name;
  std::string mode;
  std::size_t runs = 0;
  double cold_ms = 0;
  double warm_ms = 0;  // median of the warm runs
  // Median per-stage durations of the warm runs (Library mode) or the
  // service's own timing fields (Service and Http modes).
  std::vector<std::pair<std::string, double>> stages;
  bool warm_flagged = false;  // warm_ms > 1.5 × cold_ms
  std::optional<std::string> baseline;
  std::optional<double> relative_speed;  // baseline warm / this warm
};

Result<BenchReport, std::string> bench_run(std::string_view case_spec, const BenchOptions& options);

// Fills baseline and relative_speed.
void compare(BenchReport& report, const BenchReport& baseline);

std::string to_json(const BenchReport& report);

struct StressPoint {
  std::size_t depth = 0;
  double median_ms = 0;
  bool ok = false;
};

struct StressProfile {
  StressPattern pattern;
  std::vector<StressPoint> points;
  double exponent = 0;  // least-squares slope of log(time) against log(depth)
};

// Full native render at each depth, median of `runs`.
StressProfile stress_profile(StressPattern pattern, const std::vector<std::size_t>& depths, std::size_t runs);

std::string to_json(const StressProfile& profile);

struct FormulaResult {
  std::size_t line = 0;  // 1-based line in the corpus file
  std::string formula;
  bool ok = false;
  std::string error_code;
  std::string error_message;
  std::vector<std::string> offending;
};

struct CorpusReport {
  std::vector<FormulaResult> formulas;
  std::map<std::string, std::size_t> command_counts;   // commands and environment names
  std::map<std::string, std::size_t> category_counts;  // whitelist category of each counted use
  std::vector<std::string> unknown_commands;           // sorted, unique
  std::size_t passed = 0;
  std::size_t failed = 0;
  double elapsed_ms = 0;
};

// One formula per line; blank lines and lines starting with '#' are skipped.
// Each formula is parsed, emitted as MathML and rendered to SVG.
CorpusReport run_corpus_text(std::string_view text);
Result<CorpusReport, std::string> run_corpus(const std::filesystem::path& path);

std::string to_json(const CorpusReport& report);
std::string to_text(const CorpusReport& report);

}  // namespace mathrender::harness
