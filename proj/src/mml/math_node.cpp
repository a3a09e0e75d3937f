#include "mathrender/mml/math_node.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cstdint>

#include "mathrender/utf8.hpp"

namespace mathrender::mml {
namespace {

constexpr std::array<std::string_view, 4> kTokenElements = {"mi", "mn", "mo", "mtext"};

constexpr std::array<std::string_view, 20> kElements = {
    "math",  "mrow",    "mi",     "mo",    "mn",    "mtext",  "mspace", "mfrac",   "msqrt", "mroot", "msub",
    "msup",  "msubsup", "munder", "mover", "munderover", "mtable", "mtr",  "mtd",     "mstyle",
};

}  // namespace

const std::string* MathNode::attr(std::string_view name) const {
  for (const auto& [k, v] : attributes) {
    if (k == name) return &v;
  }
  return nullptr;
}

MathNode& MathNode::set(std::string name, std::string value) {
  for (auto& [k, v] : attributes) {
    if (k == name) {
      v = std::move(value);
      return *this;
    }
  }
  attributes.emplace_back(std::move(name), std::move(value));
  return *this;
}

MathNode make_token(std::string element, std::string text) {
  MathNode n;
  n.element = std::move(element);
  n.text = std::move(text);
  return n;
}

MathNode make_element(std::string element, std::vector<MathNode> children) {
  MathNode n;
  n.element = std::move(element);
  n.children = std::move(children);
  return n;
}

bool is_token_element(std::string_view element) {
  return std::find(kTokenElements.begin(), kTokenElements.end(), element) != kTokenElements.end();
}

bool is_known_element(std::string_view element) {
  return std::find(kElements.begin(), kElements.end(), element) != kElements.end();
}

std::optional<std::size_t> required_arity(std::string_view element) {
  if (element == "mfrac" || element == "msub" || element == "msup" || element == "mroot" ||
      element == "munder" || element == "mover") {
    return 2;
  }
  if (element == "msubsup" || element == "munderover") return 3;
  if (element == "mspace") return 0;
  return std::nullopt;
}

std::string decode_references(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '&' && i + 3 < text.size() && text[i + 1] == '#') {
      const std::size_t semi = text.find(';', i);
      if (semi != std::string_view::npos) {
        const bool hex = text[i + 2] == 'x' || text[i + 2] == 'X';
        const char* first = text.data() + i + (hex ? 3 : 2);
        const char* last = text.data() + semi;
        std::uint32_t cp = 0;
        auto [ptr, ec] = std::from_chars(first, last, cp, hex ? 16 : 10);
        if (ec == std::errc{} && ptr == last && first != last && cp <= 0x10FFFF && (cp < 0xD800 || cp > 0xDFFF)) {
          utf8::append(out, static_cast<char32_t>(cp));
          i = semi + 1;
          continue;
        }
      }
    }
    out += text[i++];
  }
  return out;
}

std::string describe(const MathNode& n) {
  std::string s = n.element;
  if (is_token_element(n.element)) {
    s += ' ';
    s += n.text;
    return s;
  }
  if (n.children.empty()) return s;
  s += '[';
  for (std::size_t i = 0; i < n.children.size(); ++i) {
    if (i) s += ", ";
    s += describe(n.children[i]);
  }
  s += ']';
  return s;
}

}  // namespace mathrender::mml
