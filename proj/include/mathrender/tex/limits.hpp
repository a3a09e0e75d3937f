#pragma once

#include <cstddef>

namespace mathrender {

class Budget;

// Input and nesting limits shared by the TeX and MathML front ends.
struct Limits {
  std::size_t max_input_bytes = 65536;
  std::size_t max_depth = 2500;
};

}  // namespace mathrender
