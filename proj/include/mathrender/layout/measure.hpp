#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mathrender/budget.hpp"
#include "mathrender/layout/box.hpp"
#include "mathrender/layout/metrics.hpp"
#include "mathrender/mml/math_node.hpp"
#include "mathrender/mml/symbol_table.hpp"

namespace mathrender::layout {

// Thrown when the cooperative budget runs out mid-layout.
class LayoutAborted : public std::runtime_error {
 public:
  LayoutAborted() : std::runtime_error("layout budget exhausted") {}
};

struct MeasureOptions {
  int level = 0;         // script level of the node
  bool display = false;  // display style; a math root with display="block" sets it
  std::vector<std::string>* log = nullptr;  // warnings (missing glyphs, ...)
  Budget* budget = nullptr;
};

// Box-model layout of a presentation-MathML tree.  The rules are documented
// in docs/layout.md; every length comes from the constants and metrics
// tables.  Never fails: glyphs without metrics become placeholder boxes and
// are reported in the log.
class LayoutEngine {
 public:
  explicit LayoutEngine(const GlyphMetricsTable& metrics = GlyphMetricsTable::builtin(),
                        const LayoutConstants& constants = LayoutConstants::builtin(),
                        const mml::SymbolTable& symbols = mml::SymbolTable::builtin())
      : metrics_(metrics), constants_(constants), symbols_(symbols) {}

  LayoutBox measure(const mml::MathNode& node, const MeasureOptions& options = {}) const;

  const GlyphMetricsTable& metrics() const { return metrics_; }
  const LayoutConstants& constants() const { return constants_; }

 private:
  const GlyphMetricsTable& metrics_;
  const LayoutConstants& constants_;
  const mml::SymbolTable& symbols_;
};

LayoutBox measure(const mml::MathNode& node, const GlyphMetricsTable& metrics, int level = 0);

// The code point a letter or digit is drawn with under a mathvariant, if the
// variant has a Unicode mathematical alphanumeric form for it.
char32_t variant_codepoint(char32_t cp, std::string_view variant);

}  // namespace mathrender::layout
