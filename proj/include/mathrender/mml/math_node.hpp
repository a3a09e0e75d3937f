#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mathrender::mml {

inline constexpr std::string_view kMathMLNamespace = "http://www.w3.org/1998/Math/MathML";

// One presentation-MathML element.  Token elements (mi, mo, mn, mtext) hold
// `text` and no children; everything else holds children and no text.
//
// Token text is XML character data in which '&' only ever starts a numeric
// character reference ("&#x2212;"); '<' and '>' are stored literally.
struct MathNode {
  std::string element;
  std::vector<std::pair<std::string, std::string>> attributes;  // insertion order
  std::vector<MathNode> children;
  std::string text;

  const std::string* attr(std::string_view name) const;
  // Replaces an existing value in place, otherwise appends.
  MathNode& set(std::string name, std::string value);

  bool operator==(const MathNode&) const = default;
};

MathNode make_token(std::string element, std::string text);
MathNode make_element(std::string element, std::vector<MathNode> children = {});

bool is_token_element(std::string_view element);
bool is_known_element(std::string_view element);
// Exact child count required by the element, if it has one.
std::optional<std::size_t> required_arity(std::string_view element);

// Resolves numeric character references to UTF-8.
std::string decode_references(std::string_view text);

// Compact debug form: mrow[mi x, mo +].
std::string describe(const MathNode& n);

}  // namespace mathrender::mml
