#pragma once

#include <pthread.h>

#include <atomic>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <vector>

namespace mathrender::service {

// Fixed set of threads with their own large stacks draining a bounded FIFO.
// try_post refuses work instead of growing the queue.
class WorkerPool {
 public:
  static constexpr std::size_t kDefaultStackBytes = 64u << 20;

  WorkerPool(std::size_t workers, std::size_t queue_bound, std::size_t stack_bytes = kDefaultStackBytes);
  ~WorkerPool();  // runs every accepted job, then joins
  WorkerPool(const WorkerPool&) = delete;
  WorkerPool& operator=(const WorkerPool&) = delete;

  // False when queue_bound jobs are already waiting.
  bool try_post(std::function<void()> job);

  std::size_t workers() const { return threads_.size(); }
  std::size_t queue_bound() const { return queue_bound_; }
  std::size_t queue_depth() const;
  std::size_t busy() const { return busy_.load(); }
  std::uint64_t rejected() const { return rejected_.load(); }
  std::uint64_t completed() const { return completed_.load(); }

 private:
  static void* entry(void* self);
  void run();

  std::size_t queue_bound_;
  mutable std::mutex mutex_;
  std::condition_variable cv_;
  std::deque<std::function<void()>> queue_;
  bool stopping_ = false;
  std::vector<pthread_t> threads_;
  std::atomic<std::size_t> busy_{0};
  std::atomic<std::uint64_t> rejected_{0};
  std::atomic<std::uint64_t> completed_{0};
};

// Default worker count: detected cores, at least one.
std::size_t detected_cores();

}  // namespace mathrender::service
