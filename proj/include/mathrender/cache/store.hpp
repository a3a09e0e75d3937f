#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <list>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "mathrender/cache/key.hpp"

namespace mathrender::cache {

// A stored payload is immutable once published; readers share it without copying.
struct CacheEntry {
  CacheKey key;
  std::string payload;
  std::chrono::system_clock::time_point created_at;

  std::size_t size_bytes() const { return payload.size(); }
};

struct CacheStats {
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t evictions = 0;
  std::uint64_t entries = 0;
  std::uint64_t bytes = 0;
  std::uint64_t budget_bytes = 0;
  std::uint64_t disk_records_loaded = 0;
  std::uint64_t disk_records_rejected = 0;
  std::uint64_t disk_write_failures = 0;
};

struct CacheConfig {
  std::size_t budget_bytes = 64u << 20;
  // Empty disables persistence.
  std::filesystem::path persist_path;
};

// Append-only record log.  Each record is
//   "MRC1" | key length u32 | created ms u64 | payload length u64 | key | payload | hex sha256(key ‖ payload)
// with integers big-endian.  Records that are truncated or fail the checksum
// are skipped on load; reading stops at the first record whose framing is unusable.
namespace disk {

std::string encode_record(const CacheEntry& entry);

struct LoadResult {
  std::vector<CacheEntry> entries;  // file order
  std::uint64_t rejected = 0;
  bool ok = true;  // false when the file exists but cannot be read
};

LoadResult load(const std::filesystem::path& path);

}  // namespace disk

// Thread-safe least-recently-used store bounded by total payload bytes.
// Only successful renders should be offered to put.
class RenderCache {
 public:
  explicit RenderCache(CacheConfig config = {});
  ~RenderCache();
  RenderCache(const RenderCache&) = delete;
  RenderCache& operator=(const RenderCache&) = delete;

  // Counts a hit or miss and refreshes recency on hit.
  std::shared_ptr<const CacheEntry> get(const CacheKey& key);

  // Looks up without touching statistics or recency.
  bool contains(const CacheKey& key) const;

  // Returns false when the payload alone exceeds the budget.  Re-putting an
  // existing key keeps the stored entry and refreshes recency.
  bool put(const CacheKey& key, std::string payload);

  CacheStats stats() const;

  // Blocks until queued disk writes are on disk.
  void flush();

  // Keys from least to most recently used.
  std::vector<CacheKey> keys_by_recency() const;

 private:
  struct Slot {
    std::shared_ptr<const CacheEntry> entry;
    std::list<CacheKey>::iterator position;
  };

  void insert_locked(std::shared_ptr<const CacheEntry> entry);
  void writer_loop();
  void compact(const std::vector<std::shared_ptr<const CacheEntry>>& keep);

  CacheConfig config_;
  mutable std::mutex mutex_;
  std::list<CacheKey> recency_;  // front = least recent
  std::unordered_map<std::string, Slot> slots_;
  CacheStats stats_;

  std::mutex write_mutex_;
  std::condition_variable write_cv_;
  std::condition_variable drained_cv_;
  std::deque<std::shared_ptr<const CacheEntry>> write_queue_;
  bool writing_ = false;
  bool stopping_ = false;
  bool persist_ = false;
  std::thread writer_;
};

}  // namespace mathrender::cache
