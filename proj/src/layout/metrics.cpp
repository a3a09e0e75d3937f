#include "mathrender/layout/metrics.hpp"

#include <charconv>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "mathrender/embedded_data.hpp"

namespace mathrender::layout {
namespace {

std::vector<std::string_view> lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = nl + 1;
  }
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out, int base = 10) {
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out, base);
  return ec == std::errc{} && ptr == s.data() + s.size() && !s.empty();
}

using Field = double LayoutConstants::*;

const std::map<std::string_view, Field>& fields() {
  static const std::map<std::string_view, Field> table = {
      {"axis_height", &LayoutConstants::axis_height},
      {"rule_thickness", &LayoutConstants::rule_thickness},
      {"x_height", &LayoutConstants::x_height},
      {"num_shift_display", &LayoutConstants::num_shift_display},
      {"num_shift_text", &LayoutConstants::num_shift_text},
      {"denom_shift_display", &LayoutConstants::denom_shift_display},
      {"denom_shift_text", &LayoutConstants::denom_shift_text},
      {"frac_gap_display", &LayoutConstants::frac_gap_display},
      {"frac_gap_text", &LayoutConstants::frac_gap_text},
      {"stack_gap_display", &LayoutConstants::stack_gap_display},
      {"stack_gap_text", &LayoutConstants::stack_gap_text},
      {"frac_side_padding", &LayoutConstants::frac_side_padding},
      {"sup_shift", &LayoutConstants::sup_shift},
      {"sub_shift", &LayoutConstants::sub_shift},
      {"sub_shift_with_sup", &LayoutConstants::sub_shift_with_sup},
      {"sup_drop", &LayoutConstants::sup_drop},
      {"sub_drop", &LayoutConstants::sub_drop},
      {"sub_sup_gap", &LayoutConstants::sub_sup_gap},
      {"script_space", &LayoutConstants::script_space},
      {"script_scale", &LayoutConstants::script_scale},
      {"scriptscript_scale", &LayoutConstants::scriptscript_scale},
      {"upper_limit_gap", &LayoutConstants::upper_limit_gap},
      {"upper_limit_rise", &LayoutConstants::upper_limit_rise},
      {"lower_limit_gap", &LayoutConstants::lower_limit_gap},
      {"lower_limit_drop", &LayoutConstants::lower_limit_drop},
      {"accent_gap", &LayoutConstants::accent_gap},
      {"display_operator_scale", &LayoutConstants::display_operator_scale},
      {"space_thin", &LayoutConstants::space_thin},
      {"space_medium", &LayoutConstants::space_medium},
      {"space_thick", &LayoutConstants::space_thick},
      {"radical_gap_display", &LayoutConstants::radical_gap_display},
      {"radical_gap_text", &LayoutConstants::radical_gap_text},
      {"radical_kern_before_degree", &LayoutConstants::radical_kern_before_degree},
      {"radical_kern_after_degree", &LayoutConstants::radical_kern_after_degree},
      {"radical_degree_raise", &LayoutConstants::radical_degree_raise},
      {"delimiter_max_scale", &LayoutConstants::delimiter_max_scale},
      {"table_column_gap", &LayoutConstants::table_column_gap},
      {"table_row_gap", &LayoutConstants::table_row_gap},
      {"table_strut_height", &LayoutConstants::table_strut_height},
      {"table_strut_depth", &LayoutConstants::table_strut_depth},
      {"empty_strut_height", &LayoutConstants::empty_strut_height},
      {"tofu_advance", &LayoutConstants::tofu_advance},
      {"tofu_height", &LayoutConstants::tofu_height},
      {"tofu_depth", &LayoutConstants::tofu_depth},
      {"ex_per_em", &LayoutConstants::ex_per_em},
      {"px_per_ex", &LayoutConstants::px_per_ex},
  };
  return table;
}

}  // namespace

Result<GlyphMetricsTable, std::string> GlyphMetricsTable::parse(std::string_view text) {
  GlyphMetricsTable table;
  std::size_t line_no = 0;
  for (std::string_view line : lines(text)) {
    ++line_no;
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
      const std::size_t tab = line.find('\t', start);
      cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
      if (tab == std::string_view::npos) break;
      start = tab + 1;
    }
    if (cols.size() != 5) return where + "expected 5 tab-separated columns";
    std::uint32_t cp = 0;
    if (!parse_number(cols[0], cp, 16) || cp > 0x10FFFF) return where + "bad codepoint";
    int v[4];
    for (int i = 0; i < 4; ++i) {
      if (!parse_number(cols[i + 1], v[i])) return where + "bad integer in column " + std::to_string(i + 2);
    }
    if (v[0] < 0) return where + "negative advance";
    if (v[1] + v[2] < 0) return where + "negative height + depth";
    const GlyphMetrics g{v[0] / 1000.0, v[1] / 1000.0, v[2] / 1000.0, v[3] / 1000.0};
    if (!table.glyphs_.emplace(static_cast<char32_t>(cp), g).second) return where + "duplicate codepoint";
  }
  return table;
}

const GlyphMetricsTable& GlyphMetricsTable::builtin() {
  static const GlyphMetricsTable table = [] {
    auto r = GlyphMetricsTable::parse(data::metrics_tsv());
    if (!r) throw std::runtime_error("embedded metrics: " + r.error());
    return std::move(r.value());
  }();
  return table;
}

const GlyphMetrics* GlyphMetricsTable::find(char32_t cp) const {
  auto it = glyphs_.find(cp);
  return it == glyphs_.end() ? nullptr : &it->second;
}

Result<LayoutConstants, std::string> LayoutConstants::parse(std::string_view text) {
  LayoutConstants c;
  std::map<std::string_view, bool> seen;
  std::size_t line_no = 0;
  for (std::string_view line : lines(text)) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    const std::size_t eq = line.find('=');
    if (eq == std::string_view::npos) return where + "expected name = value";
    const std::string_view name = trim(line.substr(0, eq));
    const std::string_view value = trim(line.substr(eq + 1));
    auto it = fields().find(name);
    if (it == fields().end()) return where + "unknown constant '" + std::string(name) + "'";
    if (seen[it->first]) return where + "duplicate constant '" + std::string(name) + "'";
    seen[it->first] = true;
    int v = 0;
    if (!parse_number(value, v)) return where + "value is not an integer";
    c.*(it->second) = name == "px_per_ex" ? v : v / 1000.0;
  }
  for (const auto& [name, field] : fields()) {
    if (!seen[name]) return "missing constant '" + std::string(name) + "'";
  }
  return c;
}

const LayoutConstants& LayoutConstants::builtin() {
  static const LayoutConstants constants = [] {
    auto r = LayoutConstants::parse(data::layout_conf());
    if (!r) throw std::runtime_error("embedded layout constants: " + r.error());
    return r.value();
  }();
  return constants;
}

double LayoutConstants::scale(int level) const {
  if (level <= 0) return 1.0;
  return level == 1 ? script_scale : scriptscript_scale;
}

}  // namespace mathrender::layout
