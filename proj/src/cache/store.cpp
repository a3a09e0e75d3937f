#include "mathrender/cache/store.hpp"

#include <fstream>
#include <iterator>
#include <system_error>

namespace mathrender::cache {
namespace {

constexpr std::string_view kMagic = "MRC1";
constexpr std::size_t kHeaderSize = 4 + 4 + 8 + 8;
constexpr std::size_t kChecksumSize = 64;

void put_be(std::string& out, std::uint64_t v, int bytes) {
  for (int i = bytes - 1; i >= 0; --i) out += static_cast<char>((v >> (8 * i)) & 0xFF);
}

std::uint64_t get_be(std::string_view in, std::size_t at, int bytes) {
  std::uint64_t v = 0;
  for (int i = 0; i < bytes; ++i) v = (v << 8) | static_cast<unsigned char>(in[at + i]);
  return v;
}

std::string checksum(std::string_view key, std::string_view payload) {
  std::string joined;
  joined.reserve(key.size() + payload.size());
  joined.append(key);
  joined.append(payload);
  return sha256_hex(joined);
}

std::int64_t to_ms(std::chrono::system_clock::time_point t) {
  return std::chrono::duration_cast<std::chrono::milliseconds>(t.time_since_epoch()).count();
}

}  // namespace

namespace disk {

std::string encode_record(const CacheEntry& entry) {
  std::string out;
  out.reserve(kHeaderSize + entry.key.hex.size() + entry.payload.size() + kChecksumSize);
  out += kMagic;
  put_be(out, entry.key.hex.size(), 4);
  put_be(out, static_cast<std::uint64_t>(to_ms(entry.created_at)), 8);
  put_be(out, entry.payload.size(), 8);
  out += entry.key.hex;
  out += entry.payload;
  out += checksum(entry.key.hex, entry.payload);
  return out;
}

LoadResult load(const std::filesystem::path& path) {
  LoadResult result;
  std::error_code ec;
  if (!std::filesystem::exists(path, ec)) return result;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    result.ok = false;
    return result;
  }
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) {
    result.ok = false;
    return result;
  }
  const std::string_view view(data);
  std::size_t at = 0;
  while (at < view.size()) {
    if (view.size() - at < kHeaderSize || view.substr(at, 4) != kMagic) {
      ++result.rejected;
      break;
    }
    const std::uint64_t key_len = get_be(view, at + 4, 4);
    const std::uint64_t created = get_be(view, at + 8, 8);
    const std::uint64_t payload_len = get_be(view, at + 16, 8);
    const std::size_t remaining = view.size() - at - kHeaderSize;
    if (key_len != 64 || payload_len > remaining || remaining - payload_len < key_len + kChecksumSize) {
      ++result.rejected;
      break;
    }
    const std::string_view key = view.substr(at + kHeaderSize, key_len);
    const std::string_view payload = view.substr(at + kHeaderSize + key_len, payload_len);
    const std::string_view sum = view.substr(at + kHeaderSize + key_len + payload_len, kChecksumSize);
    at += kHeaderSize + key_len + payload_len + kChecksumSize;
    if (!is_valid_key(key) || sum != checksum(key, payload)) {
      ++result.rejected;
      continue;
    }
    CacheEntry entry;
    entry.key.hex = std::string(key);
    entry.payload = std::string(payload);
    entry.created_at = std::chrono::system_clock::time_point(
        std::chrono::milliseconds(static_cast<std::int64_t>(created)));
    result.entries.push_back(std::move(entry));
  }
  return result;
}

}  // namespace disk

RenderCache::RenderCache(CacheConfig config) : config_(std::move(config)) {
  stats_.budget_bytes = config_.budget_bytes;
  if (config_.persist_path.empty()) return;

  disk::LoadResult loaded = disk::load(config_.persist_path);
  stats_.disk_records_rejected = loaded.rejected;
  std::size_t superseded = 0;
  for (CacheEntry& e : loaded.entries) {
    if (slots_.count(e.key.hex)) {
      // Later records for the same key replace earlier ones.
      auto& slot = slots_[e.key.hex];
      stats_.bytes -= slot.entry->size_bytes();
      recency_.erase(slot.position);
      slots_.erase(e.key.hex);
      ++superseded;
    }
    if (e.payload.size() > config_.budget_bytes) continue;
    insert_locked(std::make_shared<const CacheEntry>(std::move(e)));
  }
  stats_.disk_records_loaded = loaded.entries.size();
  const bool dropped = loaded.rejected > 0 || superseded > 0 || slots_.size() != loaded.entries.size();
  stats_.evictions = 0;

  persist_ = loaded.ok;
  if (persist_ && dropped) {
    std::vector<std::shared_ptr<const CacheEntry>> keep;
    for (const CacheKey& k : recency_) keep.push_back(slots_.at(k.hex).entry);
    compact(keep);
  }
  if (persist_) writer_ = std::thread([this] { writer_loop(); });
}

RenderCache::~RenderCache() {
  if (!writer_.joinable()) return;
  {
    std::lock_guard lock(write_mutex_);
    stopping_ = true;
  }
  write_cv_.notify_all();
  writer_.join();
}

void RenderCache::compact(const std::vector<std::shared_ptr<const CacheEntry>>& keep) {
  std::filesystem::path tmp = config_.persist_path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    for (const auto& e : keep) {
      const std::string record = disk::encode_record(*e);
      out.write(record.data(), static_cast<std::streamsize>(record.size()));
    }
    out.flush();
    if (!out) {
      ++stats_.disk_write_failures;
      return;
    }
  }
  std::error_code ec;
  std::filesystem::rename(tmp, config_.persist_path, ec);
  if (ec) ++stats_.disk_write_failures;
}

void RenderCache::writer_loop() {
  std::ofstream out;
  for (;;) {
    std::shared_ptr<const CacheEntry> entry;
    {
      std::unique_lock lock(write_mutex_);
      write_cv_.wait(lock, [&] { return stopping_ || !write_queue_.empty(); });
      if (write_queue_.empty()) return;
      entry = std::move(write_queue_.front());
      write_queue_.pop_front();
      writing_ = true;
    }
    if (!out.is_open()) out.open(config_.persist_path, std::ios::binary | std::ios::app);
    bool ok = false;
    if (out.is_open()) {
      const std::string record = disk::encode_record(*entry);
      out.write(record.data(), static_cast<std::streamsize>(record.size()));
      out.flush();
      ok = static_cast<bool>(out);
      if (!ok) {
        out.close();
        out.clear();
      }
    }
    if (!ok) {
      std::lock_guard lock(mutex_);
      ++stats_.disk_write_failures;
    }
    {
      std::lock_guard lock(write_mutex_);
      writing_ = false;
    }
    drained_cv_.notify_all();
  }
}

void RenderCache::insert_locked(std::shared_ptr<const CacheEntry> entry) {
  const std::size_t size = entry->size_bytes();
  while (!recency_.empty() && stats_.bytes + size > config_.budget_bytes) {
    const std::string victim = recency_.front().hex;
    recency_.pop_front();
    auto it = slots_.find(victim);
    stats_.bytes -= it->second.entry->size_bytes();
    slots_.erase(it);
    ++stats_.evictions;
  }
  recency_.push_back(entry->key);
  std::string hex = entry->key.hex;
  slots_.emplace(std::move(hex), Slot{std::move(entry), std::prev(recency_.end())});
  stats_.bytes += size;
  stats_.entries = slots_.size();
}

std::shared_ptr<const CacheEntry> RenderCache::get(const CacheKey& key) {
  std::lock_guard lock(mutex_);
  auto it = slots_.find(key.hex);
  if (it == slots_.end()) {
    ++stats_.misses;
    return nullptr;
  }
  ++stats_.hits;
  recency_.splice(recency_.end(), recency_, it->second.position);
  return it->second.entry;
}

bool RenderCache::contains(const CacheKey& key) const {
  std::lock_guard lock(mutex_);
  return slots_.count(key.hex) != 0;
}

bool RenderCache::put(const CacheKey& key, std::string payload) {
  if (payload.size() > config_.budget_bytes) return false;
  std::shared_ptr<const CacheEntry> entry;
  {
    std::lock_guard lock(mutex_);
    auto it = slots_.find(key.hex);
    if (it != slots_.end()) {
      recency_.splice(recency_.end(), recency_, it->second.position);
      return true;
    }
    entry = std::make_shared<const CacheEntry>(CacheEntry{key, std::move(payload), std::chrono::system_clock::now()});
    insert_locked(entry);
  }
  if (persist_) {
    {
      std::lock_guard lock(write_mutex_);
      write_queue_.push_back(std::move(entry));
    }
    write_cv_.notify_one();
  }
  return true;
}

CacheStats RenderCache::stats() const {
  std::lock_guard lock(mutex_);
  CacheStats s = stats_;
  s.entries = slots_.size();
  return s;
}

void RenderCache::flush() {
  if (!persist_) return;
  std::unique_lock lock(write_mutex_);
  drained_cv_.wait(lock, [&] { return write_queue_.empty() && !writing_; });
}

std::vector<CacheKey> RenderCache::keys_by_recency() const {
  std::lock_guard lock(mutex_);
  return {recency_.begin(), recency_.end()};
}

}  // namespace mathrender::cache
