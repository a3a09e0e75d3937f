#pragma once

#include <string>
#include <string_view>

#include "mathrender/layout/svg.hpp"

namespace mathrender::service {

inline constexpr std::string_view kWrapperClass = "mathrender";
inline constexpr std::string_view kMathMLClass = "mathrender-mathml";
inline constexpr std::string_view kFallbackClass = "mathrender-fallback";

// MathML element and SVG image side by side inside one span:
//   <span class="mathrender mathrender-inline|mathrender-block">
//     <span class="mathrender-mathml">MATH</span><span class="mathrender-fallback">SVG</span>
//   </span>
// The stylesheet served at /fallback.css decides which half is visible.
std::string compose_fallback_html(std::string_view mml, const layout::SvgDocument& svg, bool display);

}  // namespace mathrender::service
