#include "mathrender/stack_guard.hpp"

#include <pthread.h>

#include <cstdint>

namespace mathrender {
namespace {

struct StackBounds {
  std::uintptr_t low = 0;
  bool known = false;
};

StackBounds query_bounds() {
  StackBounds b;
  pthread_attr_t attr;
  if (pthread_getattr_np(pthread_self(), &attr) != 0) return b;
  void* addr = nullptr;
  std::size_t size = 0;
  if (pthread_attr_getstack(&attr, &addr, &size) == 0) {
    b.low = reinterpret_cast<std::uintptr_t>(addr);
    b.known = true;
  }
  pthread_attr_destroy(&attr);
  return b;
}

}  // namespace

std::size_t stack_remaining() {
  thread_local const StackBounds bounds = query_bounds();
  if (!bounds.known) return SIZE_MAX;
  char marker;
  const auto here = reinterpret_cast<std::uintptr_t>(&marker);
  return here > bounds.low ? here - bounds.low : 0;
}

}  // namespace mathrender
