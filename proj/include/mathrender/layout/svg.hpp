#pragma once

#include <string>
#include <string_view>

#include "mathrender/layout/box.hpp"
#include "mathrender/layout/metrics.hpp"

namespace mathrender::layout {

inline constexpr std::string_view kSvgNamespace = "http://www.w3.org/2000/svg";
inline constexpr std::string_view kSvgFontFamily = "STIXGeneral,'STIX Two Math','DejaVu Serif',serif";

// Sizes in ex; the user coordinate system is ex with the baseline at y = 0.
struct SvgDocument {
  double width = 0;
  double height = 0;          // height + depth of the root box
  double vertical_align = 0;  // baseline offset for inline embedding (minus the depth)
  std::string body;           // complete svg element
};

// Glyphs become text elements at their baselines, rules become rect
// elements; output bytes depend only on the box tree.
SvgDocument emit_svg(const LayoutBox& root, const LayoutConstants& constants = LayoutConstants::builtin());

// Fixed four-decimal rendering with trailing zeros trimmed; never "-0".
std::string format_number(double v);

}  // namespace mathrender::layout
