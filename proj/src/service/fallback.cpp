#include "mathrender/service/fallback.hpp"

namespace mathrender::service {

std::string compose_fallback_html(std::string_view mml, const layout::SvgDocument& svg, bool display) {
  std::string out;
  out.reserve(mml.size() + svg.body.size() + 160);
  out += "<span class=\"";
  out += kWrapperClass;
  out += display ? " mathrender-block\">" : " mathrender-inline\">";
  out += "<span class=\"";
  out += kMathMLClass;
  out += "\">";
  out += mml;
  out += "</span><span class=\"";
  out += kFallbackClass;
  out += "\" aria-hidden=\"true\">";
  out += svg.body;
  out += "</span></span>";
  return out;
}

}  // namespace mathrender::service
