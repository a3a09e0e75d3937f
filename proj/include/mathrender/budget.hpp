#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

namespace mathrender {

// Cooperative CPU-time budget.  Long-running stages call expired() from
// their inner loops; the clock is only read every kCheckInterval calls.
class Budget {
 public:
  using Clock = std::chrono::steady_clock;

  Budget() = default;
  explicit Budget(std::chrono::milliseconds limit) : deadline_(Clock::now() + limit) {}

  bool expired() {
    if (!deadline_) return false;
    if (tripped_) return true;
    if (++calls_ % kCheckInterval != 0) return false;
    tripped_ = Clock::now() >= *deadline_;
    return tripped_;
  }

 private:
  static constexpr std::uint32_t kCheckInterval = 256;
  std::optional<Clock::time_point> deadline_;
  std::uint32_t calls_ = 0;
  bool tripped_ = false;
};

}  // namespace mathrender
