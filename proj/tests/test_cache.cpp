#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "mathrender/cache/headers.hpp"
#include "mathrender/cache/key.hpp"
#include "mathrender/cache/store.hpp"

using namespace mathrender::cache;
namespace fs = std::filesystem;

namespace {

// Reference model: a plain vector ordered from least to most recent.
struct ModelLru {
  std::size_t budget;
  std::vector<std::pair<std::string, std::size_t>> order;
  std::uint64_t hits = 0, misses = 0, evictions = 0;

  std::size_t bytes() const {
    std::size_t b = 0;
    for (const auto& [k, s] : order) b += s;
    return b;
  }
  bool get(const std::string& k) {
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i].first == k) {
        auto item = order[i];
        order.erase(order.begin() + static_cast<long>(i));
        order.push_back(item);
        ++hits;
        return true;
      }
    }
    ++misses;
    return false;
  }
  void put(const std::string& k, std::size_t size) {
    if (size > budget) return;
    for (std::size_t i = 0; i < order.size(); ++i) {
      if (order[i].first == k) {
        auto item = order[i];
        order.erase(order.begin() + static_cast<long>(i));
        order.push_back(item);
        return;
      }
    }
    while (!order.empty() && bytes() + size > budget) {
      order.erase(order.begin());
      ++evictions;
    }
    order.emplace_back(k, size);
  }
};

CacheKey key_of(int i) { return cache_key(InputType::Tex, "k" + std::to_string(i), {}); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("mathrender_cache_test_" + std::to_string(std::random_device{}()));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("sha256 matches published vectors") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(sha256_hex("") == "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
}

TEST_CASE("cache key preimage layout") {
  // Digests computed with Python hashlib over
  // bytes([1]) + tag + len(input).to_bytes(8, "big") + input + b"charset=utf8\ndisplay=inline\n".
  const KeyOptions opts{{"display", "inline"}, {"charset", "utf8"}};
  CHECK(cache_key(InputType::Tex, "x^{2}", opts).hex ==
        "13922faca7758293844300c58cfe59d4fdb0bb643b0fc9e909792d16ea31d441");
  CHECK(cache_key(InputType::Mml, "x^{2}", opts).hex ==
        "cdf13fdb3a9e57ffb783e8786d77650257a1424a837ae95091a0e1c87b3b6347");

  SUBCASE("every option and input byte matters") {
    const CacheKey base = cache_key(InputType::Tex, "x", opts);
    CHECK(base != cache_key(InputType::Tex, "y", opts));
    CHECK(base != cache_key(InputType::Tex, "x", {{"display", "block"}, {"charset", "utf8"}}));
    CHECK(base != cache_key(InputType::Tex, "x", {}));
    CHECK(base == cache_key(InputType::Tex, "x", opts));
  }
  SUBCASE("length prefix separates input from options") {
    CHECK(cache_key(InputType::Tex, "a=b\n", {}) != cache_key(InputType::Tex, "", {{"a", "b"}}));
  }
  SUBCASE("key validation") {
    CHECK(is_valid_key(cache_key(InputType::Tex, "x", {}).hex));
    CHECK_FALSE(is_valid_key("abc"));
    CHECK_FALSE(is_valid_key(std::string(64, 'G')));
    CHECK_FALSE(is_valid_key(std::string(63, 'a') + "/"));
  }
}

TEST_CASE("lru agrees with a reference model") {
  std::mt19937 rng(20261015);
  for (int round = 0; round < 20; ++round) {
    const std::size_t budget = 200 + rng() % 2000;
    RenderCache cache(CacheConfig{budget, {}});
    ModelLru model{budget, {}};
    for (int op = 0; op < 2000; ++op) {
      const int k = static_cast<int>(rng() % 40);
      const CacheKey key = key_of(k);
      if (rng() % 2) {
        const std::size_t size = rng() % 300;
        const std::string payload(size, static_cast<char>('a' + k % 26));
        const bool stored = cache.put(key, payload);
        CHECK(stored == (size <= budget));
        model.put(key.hex, size);
      } else {
        const bool hit = cache.get(key) != nullptr;
        REQUIRE(hit == model.get(key.hex));
      }
      const CacheStats s = cache.stats();
      REQUIRE(s.bytes == model.bytes());
      REQUIRE(s.bytes <= budget);
      REQUIRE(s.entries == model.order.size());
    }
    const CacheStats s = cache.stats();
    CHECK(s.hits == model.hits);
    CHECK(s.misses == model.misses);
    CHECK(s.evictions == model.evictions);
    const auto keys = cache.keys_by_recency();
    REQUIRE(keys.size() == model.order.size());
    for (std::size_t i = 0; i < keys.size(); ++i) CHECK(keys[i].hex == model.order[i].first);
  }
}

TEST_CASE("filling past the budget evicts the least recent entry") {
  RenderCache cache(CacheConfig{10 * 100, {}});
  for (int i = 0; i < 10; ++i) REQUIRE(cache.put(key_of(i), std::string(100, 'x')));
  CHECK(cache.get(key_of(0)) != nullptr);  // 0 becomes most recent, 1 is now oldest
  REQUIRE(cache.put(key_of(10), std::string(100, 'y')));
  CHECK_FALSE(cache.contains(key_of(1)));
  CHECK(cache.contains(key_of(0)));
  CHECK(cache.contains(key_of(10)));
  CHECK(cache.stats().evictions == 1);
  CHECK(cache.stats().bytes == 1000);
}

TEST_CASE("stored payloads come back byte-identical and put is idempotent") {
  RenderCache cache;
  std::string payload = "<svg>\xE2\x88\x91</svg>";
  payload.push_back('\0');
  payload += "tail";
  const CacheKey k = key_of(1);
  CHECK(cache.get(k) == nullptr);
  REQUIRE(cache.put(k, payload));
  auto first = cache.get(k);
  REQUIRE(first);
  CHECK(first->payload == payload);
  CHECK(first->size_bytes() == payload.size());
  CHECK(first->key == k);
  REQUIRE(cache.put(k, payload));
  auto second = cache.get(k);
  CHECK(second == first);
  CHECK(cache.stats().entries == 1);
  CHECK(cache.stats().bytes == payload.size());
  CHECK(cache.stats().hits == 2);
  CHECK(cache.stats().misses == 1);

  SUBCASE("oversized payloads are refused") {
    RenderCache tiny(CacheConfig{10, {}});
    CHECK_FALSE(tiny.put(k, std::string(11, 'x')));
    CHECK(tiny.stats().entries == 0);
  }
}

TEST_CASE("disk store survives restart and rejects damaged records") {
  TempDir dir;
  const fs::path file = dir.path / "cache.log";
  {
    RenderCache cache(CacheConfig{1 << 20, file});
    for (int i = 0; i < 5; ++i) cache.put(key_of(i), "payload-" + std::to_string(i));
    cache.flush();
  }
  {
    RenderCache cache(CacheConfig{1 << 20, file});
    CHECK(cache.stats().disk_records_loaded == 5);
    CHECK(cache.stats().disk_records_rejected == 0);
    for (int i = 0; i < 5; ++i) {
      auto e = cache.get(key_of(i));
      REQUIRE(e);
      CHECK(e->payload == "payload-" + std::to_string(i));
    }
  }

  SUBCASE("torn tail") {
    const std::string whole = slurp(file);
    CacheEntry extra{key_of(99), "never completed", std::chrono::system_clock::now()};
    const std::string record = disk::encode_record(extra);
    {
      std::ofstream out(file, std::ios::binary | std::ios::app);
      out.write(record.data(), static_cast<std::streamsize>(record.size() / 2));
    }
    RenderCache cache(CacheConfig{1 << 20, file});
    CHECK(cache.stats().disk_records_rejected == 1);
    CHECK(cache.stats().entries == 5);
    CHECK_FALSE(cache.contains(key_of(99)));
    cache.flush();
    CHECK(slurp(file) == whole);  // compacted back to the intact records
  }

  SUBCASE("flipped payload byte") {
    std::string bytes = slurp(file);
    const std::size_t at = bytes.find("payload-2");
    REQUIRE(at != std::string::npos);
    bytes[at + 8] = '7';
    {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << bytes;
    }
    RenderCache cache(CacheConfig{1 << 20, file});
    CHECK(cache.stats().disk_records_rejected == 1);
    CHECK(cache.get(key_of(2)) == nullptr);
    for (int i : {0, 1, 3, 4}) CHECK(cache.get(key_of(i)) != nullptr);
  }

  SUBCASE("garbage file") {
    {
      std::ofstream out(file, std::ios::binary | std::ios::trunc);
      out << "not a cache file at all";
    }
    RenderCache cache(CacheConfig{1 << 20, file});
    CHECK(cache.stats().entries == 0);
    CHECK(cache.stats().disk_records_rejected == 1);
    cache.put(key_of(1), "fresh");
    cache.flush();
    RenderCache reopened(CacheConfig{1 << 20, file});
    CHECK(reopened.stats().disk_records_rejected == 0);
    REQUIRE(reopened.get(key_of(1)));
  }

  SUBCASE("later records win and the budget applies on load") {
    {
      std::ofstream out(file, std::ios::binary | std::ios::app);
      out << disk::encode_record(CacheEntry{key_of(0), "replacement", std::chrono::system_clock::now()});
    }
    RenderCache cache(CacheConfig{30, file});
    CHECK(cache.stats().bytes <= 30);
    auto e = cache.get(key_of(0));
    REQUIRE(e);
    CHECK(e->payload == "replacement");
  }
}

TEST_CASE("unwritable persistence degrades to memory only") {
  TempDir dir;
  const fs::path file = dir.path / "missing" / "dir" / "cache.log";
  RenderCache cache(CacheConfig{1 << 20, file});
  REQUIRE(cache.put(key_of(1), "value"));
  cache.flush();
  REQUIRE(cache.get(key_of(1)));
  CHECK(cache.stats().disk_write_failures >= 1);
}

TEST_CASE("lookup cost does not depend on entry size") {
  RenderCache cache(CacheConfig{16u << 20, {}});
  const CacheKey small = cache_key(InputType::Tex, "x+y=z^{2}", {});
  const CacheKey large = cache_key(InputType::Tex, std::string(65536, 'x'), {});
  cache.put(small, std::string(10, 's'));
  cache.put(large, std::string(4u << 20, 'L'));
  auto median_ns = [&](const CacheKey& k) {
    std::vector<double> samples;
    for (int i = 0; i < 1000; ++i) {
      const auto t0 = std::chrono::steady_clock::now();
      auto e = cache.get(k);
      const auto t1 = std::chrono::steady_clock::now();
      REQUIRE(e);
      samples.push_back(std::chrono::duration<double, std::nano>(t1 - t0).count());
    }
    std::nth_element(samples.begin(), samples.begin() + 500, samples.end());
    return samples[500];
  };
  const double s = median_ns(small);
  const double l = median_ns(large);
  CHECK(l < 10 * s);
  CHECK(s < 10 * l);
}

TEST_CASE("concurrent access keeps the store consistent") {
  RenderCache cache(CacheConfig{5000, {}});
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&, t] {
      std::mt19937 rng(static_cast<unsigned>(t));
      for (int i = 0; i < 5000; ++i) {
        const int k = static_cast<int>(rng() % 100);
        if (rng() % 2) {
          cache.put(key_of(k), std::string(50 + k, static_cast<char>('a' + k % 26)));
        } else if (auto e = cache.get(key_of(k))) {
          CHECK(e->payload == std::string(50 + k, static_cast<char>('a' + k % 26)));
        }
      }
    });
  }
  for (auto& th : threads) th.join();
  const CacheStats s = cache.stats();
  CHECK(s.bytes <= 5000);
  CHECK(s.hits + s.misses > 0);
  std::size_t total = 0;
  for (const CacheKey& k : cache.keys_by_recency()) {
    auto e = cache.get(k);
    REQUIRE(e);
    total += e->size_bytes();
  }
  CHECK(total == s.bytes);
}

TEST_CASE("http validator headers") {
  const CacheKey k = key_of(7);
  const HeaderList h = cache_headers(k, BodyFormat::Svg);
  auto find = [&](std::string_view name) {
    for (const auto& [n, v] : h)
      if (n == name) return v;
    return std::string();
  };
  CHECK(find("ETag") == "\"" + k.hex + "\"");
  CHECK(find("Cache-Control").find("public") != std::string::npos);
  CHECK(find("Cache-Control").find("max-age=31536000") != std::string::npos);
  CHECK(find("Content-Type").rfind("image/svg+xml", 0) == 0);
  CHECK(std::string(content_type(BodyFormat::Json)).rfind("application/json", 0) == 0);
  CHECK(std::string(content_type(BodyFormat::MathML)).rfind("application/mathml+xml", 0) == 0);

  CHECK(matches_if_none_match("\"" + k.hex + "\"", k));
  CHECK(matches_if_none_match("W/\"" + k.hex + "\"", k));
  CHECK(matches_if_none_match("\"abc\", \"" + k.hex + "\"", k));
  CHECK(matches_if_none_match("*", k));
  CHECK(matches_if_none_match(k.hex, k));
  CHECK_FALSE(matches_if_none_match("\"abc\"", k));
  CHECK_FALSE(matches_if_none_match("", k));
}
