#pragma once

#include <string>
#include <string_view>
#include <unordered_map>

#include "mathrender/result.hpp"

namespace mathrender::layout {

// All lengths in em at text size.
struct GlyphMetrics {
  double advance = 0;
  double height = 0;
  double depth = 0;
  double italic = 0;
};

// Lines of `codepoint<TAB>advance<TAB>height<TAB>depth<TAB>italic` in
// milli-em, codepoint in hex; '#' starts a comment line.
class GlyphMetricsTable {
 public:
  static Result<GlyphMetricsTable, std::string> parse(std::string_view text);
  static const GlyphMetricsTable& builtin();

  const GlyphMetrics* find(char32_t cp) const;
  std::size_t size() const { return glyphs_.size(); }

 private:
  std::unordered_map<char32_t, GlyphMetrics> glyphs_;
};

// Values from layout.conf.  Lengths are em at text size; ratios are plain
// factors (the file stores both in thousandths).
struct LayoutConstants {
  double axis_height = 0;
  double rule_thickness = 0;
  double x_height = 0;

  double num_shift_display = 0;
  double num_shift_text = 0;
  double denom_shift_display = 0;
  double denom_shift_text = 0;
  double frac_gap_display = 0;
  double frac_gap_text = 0;
  double stack_gap_display = 0;
  double stack_gap_text = 0;
  double frac_side_padding = 0;

  double sup_shift = 0;
  double sub_shift = 0;
  double sub_shift_with_sup = 0;
  double sup_drop = 0;
  double sub_drop = 0;
  double sub_sup_gap = 0;
  double script_space = 0;
  double script_scale = 0;
  double scriptscript_scale = 0;

  double upper_limit_gap = 0;
  double upper_limit_rise = 0;
  double lower_limit_gap = 0;
  double lower_limit_drop = 0;
  double accent_gap = 0;
  double display_operator_scale = 0;

  double space_thin = 0;
  double space_medium = 0;
  double space_thick = 0;

  double radical_gap_display = 0;
  double radical_gap_text = 0;
  double radical_kern_before_degree = 0;
  double radical_kern_after_degree = 0;
  double radical_degree_raise = 0;

  double delimiter_max_scale = 0;

  double table_column_gap = 0;
  double table_row_gap = 0;
  double table_strut_height = 0;
  double table_strut_depth = 0;

  double empty_strut_height = 0;
  double tofu_advance = 0;
  double tofu_height = 0;
  double tofu_depth = 0;

  double ex_per_em = 0;
  double px_per_ex = 0;  // pixels, not thousandths

  // Every key must be present exactly once; unknown keys are errors.
  static Result<LayoutConstants, std::string> parse(std::string_view text);
  static const LayoutConstants& builtin();

  // Glyph scale factor of a script level (0, 1, 2+).
  double scale(int level) const;
};

}  // namespace mathrender::layout
