#include "mathrender/cache/key.hpp"

#include <openssl/evp.h>

#include <array>
#include <stdexcept>

namespace mathrender::cache {
namespace {

using Digest = std::array<unsigned char, 32>;

class Sha256 {
 public:
  Sha256() : ctx_(EVP_MD_CTX_new()) {
    if (!ctx_ || EVP_DigestInit_ex(ctx_, EVP_sha256(), nullptr) != 1) throw std::runtime_error("sha256 init failed");
  }
  ~Sha256() { EVP_MD_CTX_free(ctx_); }
  Sha256(const Sha256&) = delete;
  Sha256& operator=(const Sha256&) = delete;

  void update(std::string_view bytes) { EVP_DigestUpdate(ctx_, bytes.data(), bytes.size()); }

  Digest finish() {
    Digest d{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx_, d.data(), &len);
    return d;
  }

 private:
  EVP_MD_CTX* ctx_;
};

std::string to_hex(const Digest& d) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(64);
  for (unsigned char b : d) {
    out += kHex[b >> 4];
    out += kHex[b & 0xF];
  }
  return out;
}

}  // namespace

std::string_view to_string(InputType type) { return type == InputType::Tex ? "tex" : "mml"; }

CacheKey cache_key(InputType type, std::string_view normalized_input, const KeyOptions& options) {
  Sha256 h;
  const char head[2] = {static_cast<char>(kFormatVersion), type == InputType::Tex ? 't' : 'm'};
  h.update(std::string_view(head, 2));
  char len[8];
  std::uint64_t n = normalized_input.size();
  for (int i = 7; i >= 0; --i) {
    len[i] = static_cast<char>(n & 0xFF);
    n >>= 8;
  }
  h.update(std::string_view(len, 8));
  h.update(normalized_input);
  for (const auto& [name, value] : options) {
    h.update(name);
    h.update("=");
    h.update(value);
    h.update("\n");
  }
  return CacheKey{to_hex(h.finish())};
}

bool is_valid_key(std::string_view hex) {
  if (hex.size() != 64) return false;
  for (char c : hex) {
    if (!((c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'))) return false;
  }
  return true;
}

std::string sha256_hex(std::string_view bytes) {
  Sha256 h;
  h.update(bytes);
  return to_hex(h.finish());
}

}  // namespace mathrender::cache
