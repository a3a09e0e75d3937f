#pragma once

#include "mathrender/mml/math_node.hpp"
#include "mathrender/mml/symbol_table.hpp"
#include "mathrender/tex/ast.hpp"

namespace mathrender::mml {

enum class Charset { Utf8Literals, NumericReferences };

struct EmitOptions {
  Charset charset = Charset::Utf8Literals;
  bool display = false;  // display="block" on the root
};

// Presentation MathML for a validated, macro-expanded tree.  The root is a
// math element holding exactly one mrow; other single-child mrows are
// collapsed.
MathNode emit_mathml(const tex::Node& ast, const EmitOptions& options = {},
                     const SymbolTable& table = SymbolTable::builtin());

}  // namespace mathrender::mml
