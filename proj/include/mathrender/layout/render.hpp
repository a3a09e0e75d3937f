#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mathrender/budget.hpp"
#include "mathrender/layout/svg.hpp"
#include "mathrender/mml/emit.hpp"
#include "mathrender/result.hpp"
#include "mathrender/tex/limits.hpp"
#include "mathrender/tex/parse_error.hpp"

namespace mathrender::layout {

struct RenderOptions {
  mml::Charset charset = mml::Charset::Utf8Literals;
  bool display = false;
  Limits limits;
  Budget* budget = nullptr;
};

struct Rendered {
  mml::MathNode mathml;
  SvgDocument svg;
  std::vector<std::string> log;
};

// parse, macro expansion, MathML, layout and SVG.  An exhausted budget is
// reported as a Timeout error; nothing partial is returned.
Result<Rendered, tex::ParseError> render_tex_to_svg(std::string_view input, const RenderOptions& options = {});

// Layout and SVG for a MathML tree from any source.  Throws LayoutAborted
// when the budget runs out.
SvgDocument render_mathml_to_svg(const mml::MathNode& math, std::vector<std::string>* log = nullptr,
                                 Budget* budget = nullptr);

}  // namespace mathrender::layout
