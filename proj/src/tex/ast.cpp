#include "mathrender/tex/ast.hpp"

#include <algorithm>

namespace mathrender::tex {

std::string_view to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::Row: return "Row";
    case NodeKind::Symbol: return "Symbol";
    case NodeKind::Identifier: return "Identifier";
    case NodeKind::Number: return "Number";
    case NodeKind::Operator: return "Operator";
    case NodeKind::Fraction: return "Fraction";
    case NodeKind::Script: return "Script";
    case NodeKind::Radical: return "Radical";
    case NodeKind::Delimited: return "Delimited";
    case NodeKind::Function: return "Function";
    case NodeKind::Array: return "Array";
    case NodeKind::Styled: return "Styled";
    case NodeKind::Text: return "Text";
    case NodeKind::Accent: return "Accent";
    case NodeKind::Stack: return "Stack";
  }
  return "?";
}

bool operator==(const Node& a, const Node& b) {
  return a.kind == b.kind && a.text == b.text && a.command == b.command && a.annotation == b.annotation &&
         a.left == b.left && a.right == b.right && a.spec == b.spec && a.has_sub == b.has_sub &&
         a.has_sup == b.has_sup && a.has_index == b.has_index && a.switch_style == b.switch_style &&
         a.children == b.children;
}

Node make_leaf(NodeKind kind, std::string text, Span span) {
  Node n;
  n.kind = kind;
  n.text = std::move(text);
  n.span = span;
  return n;
}

std::size_t depth(const Node& n) {
  std::size_t d = 0;
  for (const auto& c : n.children) d = std::max(d, depth(c));
  if (n.kind == NodeKind::Row || n.children.empty()) return d;
  return d + 1;
}

std::string describe(const Node& n) {
  std::string s(to_string(n.kind));
  switch (n.kind) {
    case NodeKind::Symbol:
    case NodeKind::Identifier:
    case NodeKind::Number:
    case NodeKind::Function:
    case NodeKind::Text:
      s += ' ' + n.text;
      break;
    case NodeKind::Operator:
      s += ' ' + n.command + n.text;
      break;
    case NodeKind::Delimited:
      s += ' ' + n.left + n.right;
      break;
    case NodeKind::Array:
      s += ' ' + n.text;
      break;
    default:
      if (!n.command.empty()) s += ' ' + n.command;
  }
  if (!n.children.empty()) {
    s += n.kind == NodeKind::Row ? "[" : "(";
    for (std::size_t i = 0; i < n.children.size(); ++i) {
      if (i) s += ", ";
      if (n.kind == NodeKind::Script && i > 0) {
        const bool is_sub = n.has_sub && i == 1;
        s += is_sub ? "sub=" : "sup=";
      }
      s += describe(n.children[i]);
    }
    s += n.kind == NodeKind::Row ? "]" : ")";
  }
  return s;
}

}  // namespace mathrender::tex
