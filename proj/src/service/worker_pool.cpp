#include "mathrender/service/worker_pool.hpp"

#include <stdexcept>
#include <string>
#include <thread>

namespace mathrender::service {

std::size_t detected_cores() {
  const unsigned n = std::thread::hardware_concurrency();
  return n == 0 ? 1 : n;
}

WorkerPool::WorkerPool(std::size_t workers, std::size_t queue_bound, std::size_t stack_bytes)
    : queue_bound_(queue_bound) {
  if (workers == 0) throw std::invalid_argument("worker pool needs at least one worker");
  pthread_attr_t attr;
  pthread_attr_init(&attr);
  pthread_attr_setstacksize(&attr, stack_bytes);
  for (std::size_t i = 0; i < workers; ++i) {
    pthread_t t;
    const int rc = pthread_create(&t, &attr, &WorkerPool::entry, this);
    if (rc != 0) {
      pthread_attr_destroy(&attr);
      {
        std::lock_guard lock(mutex_);
        stopping_ = true;
      }
      cv_.notify_all();
      for (pthread_t started : threads_) pthread_join(started, nullptr);
      throw std::runtime_error("pthread_create failed: " + std::to_string(rc));
    }
    threads_.push_back(t);
  }
  pthread_attr_destroy(&attr);
}

WorkerPool::~WorkerPool() {
  {
    std::lock_guard lock(mutex_);
    stopping_ = true;
  }
  cv_.notify_all();
  for (pthread_t t : threads_) pthread_join(t, nullptr);
}

void* WorkerPool::entry(void* self) {
  static_cast<WorkerPool*>(self)->run();
  return nullptr;
}

void WorkerPool::run() {
  for (;;) {
    std::function<void()> job;
    {
      std::unique_lock lock(mutex_);
      cv_.wait(lock, [&] { return stopping_ || !queue_.empty(); });
      if (queue_.empty()) return;
      job = std::move(queue_.front());
      queue_.pop_front();
      ++busy_;
    }
    job();
    --busy_;
    ++completed_;
  }
}

bool WorkerPool::try_post(std::function<void()> job) {
  {
    std::lock_guard lock(mutex_);
    if (stopping_ || queue_.size() >= queue_bound_) {
      ++rejected_;
      return false;
    }
    queue_.push_back(std::move(job));
  }
  cv_.notify_one();
  return true;
}

std::size_t WorkerPool::queue_depth() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

}  // namespace mathrender::service
