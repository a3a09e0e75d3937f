#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mathrender::tex {

enum class NodeKind {
  Row,         // children: items
  Symbol,      // text: canonical command ("\alpha", "\Reals")
  Identifier,  // text: letter, or expansion of a semantic macro (+annotation)
  Number,      // text: digits with optional decimal part
  Operator,    // text: literal character, or delimiter spelling when sized by `command`
  Fraction,    // command; children: numerator, denominator
  Script,      // children: base, [sub], [sup] per has_sub / has_sup
  Radical,     // children: radicand, [index] per has_index
  Delimited,   // left, right: delimiter spellings ("." = none); children: body
  Function,    // text: command ("\sin"), or literal name with command "\operatorname"
  Array,       // text: environment; spec: column spec; children: Row per table row, one child per cell
  Styled,      // command; children: body (switch_style for \rm, \displaystyle, ...)
  Text,        // command; text: literal
  Accent,      // command; children: body
  Stack,       // command ("\overset", ...); children: script, base
};

std::string_view to_string(NodeKind kind);

struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  bool contains(const Span& o) const { return begin <= o.begin && o.end <= end; }
};

struct Node {
  NodeKind kind = NodeKind::Row;
  Span span;
  std::string text;
  std::string command;
  std::string annotation;
  std::string left;
  std::string right;
  std::string spec;
  bool has_sub = false;
  bool has_sup = false;
  bool has_index = false;
  bool switch_style = false;  // \rm-style switch applying to the rest of its row
  std::vector<Node> children;

  const Node& base() const { return children.at(0); }
  const Node* sub() const { return has_sub ? &children.at(1) : nullptr; }
  const Node* sup() const { return has_sup ? &children.at(has_sub ? 2 : 1) : nullptr; }
  const Node* index() const { return has_index ? &children.at(1) : nullptr; }

  // Structural equality: everything except source spans.
  friend bool operator==(const Node& a, const Node& b);
};

Node make_leaf(NodeKind kind, std::string text, Span span);

// Nesting depth counting structural nodes; rows are transparent and leaves
// have depth 0, so "x" is 0 and \frac{x}{\frac{x}{x}} is 2.
std::size_t depth(const Node& n);

// Debug rendering, e.g. Row[Fraction(Identifier x, Number 2), Operator =].
std::string describe(const Node& n);

}  // namespace mathrender::tex
