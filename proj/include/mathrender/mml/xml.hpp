#pragma once

#include <cstddef>
#include <string>
#include <string_view>

#include "mathrender/mml/math_node.hpp"
#include "mathrender/result.hpp"

namespace mathrender::mml {

// Deterministic XML text; attributes in insertion order, no whitespace
// between elements.
std::string serialize_mathml(const MathNode& node);

enum class MathMLErrorCode { NotWellFormed, UnknownElement, ArityViolation, InputTooLarge };

std::string_view to_string(MathMLErrorCode code);

struct MathMLParseError {
  MathMLErrorCode code = MathMLErrorCode::NotWellFormed;
  std::string message;
  std::size_t line = 1;    // 1-based
  std::size_t column = 1;  // 1-based, in code points
};

struct MathMLLimits {
  std::size_t max_bytes = 1 << 20;
  std::size_t max_depth = 10000;
};

// Reads a presentation-MathML document restricted to the supported subset.
// `semantics` is unwrapped to its first child, `mfenced` becomes an mrow
// with stretchy fences, and a missing namespace is added to the root.
Result<MathNode, MathMLParseError> parse_mathml(std::string_view document, const MathMLLimits& limits = {});

}  // namespace mathrender::mml
