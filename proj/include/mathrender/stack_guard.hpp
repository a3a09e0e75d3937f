#pragma once

#include <cstddef>

namespace mathrender {

// Bytes of call stack still available to the calling thread, measured from
// the current frame.  Recursive stages compare this against a reserve so
// that configuration mistakes surface as errors rather than stack faults.
std::size_t stack_remaining();

inline constexpr std::size_t kStackReserve = 256 * 1024;

}  // namespace mathrender
