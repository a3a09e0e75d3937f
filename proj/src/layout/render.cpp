#include "mathrender/layout/render.hpp"

#include "mathrender/layout/measure.hpp"
#include "mathrender/tex/parser.hpp"

namespace mathrender::layout {

SvgDocument render_mathml_to_svg(const mml::MathNode& math, std::vector<std::string>* log, Budget* budget) {
  MeasureOptions options;
  options.log = log;
  options.budget = budget;
  LayoutBox box = LayoutEngine().measure(math, options);
  SvgDocument svg = emit_svg(box);
  dispose(std::move(box));
  return svg;
}

Result<Rendered, tex::ParseError> render_tex_to_svg(std::string_view input, const RenderOptions& options) {
  const tex::CommandWhitelist& whitelist = tex::CommandWhitelist::builtin();
  auto ast = tex::parse(input, whitelist, options.limits, options.budget);
  if (!ast) return ast.error();
  Rendered out;
  mml::EmitOptions emit;
  emit.charset = options.charset;
  emit.display = options.display;
  out.mathml = mml::emit_mathml(tex::expand_semantic_macros(ast.value(), whitelist), emit);
  try {
    out.svg = render_mathml_to_svg(out.mathml, &out.log, options.budget);
  } catch (const LayoutAborted&) {
    return tex::ParseError{tex::ParseErrorCode::Timeout, "render budget exhausted during layout", 0, {}};
  }
  return out;
}

}  // namespace mathrender::layout
