#pragma once

#include <map>
#include <string>
#include <string_view>

#include "mathrender/result.hpp"

namespace mathrender::mml {

enum class SymbolKind { Identifier, Operator, Space, Function, Accent, Variant, Text, Environment };

enum class OperatorClass { Ord, Bin, Rel, Open, Close, Punct, Large, Fence, Apply };

std::string_view to_string(OperatorClass c);

struct SymbolEntry {
  std::string key;
  SymbolKind kind = SymbolKind::Identifier;
  std::string value;
  OperatorClass op_class = OperatorClass::Ord;
  bool limits = false;    // operators and functions: scripts go under/over in display style
  bool stretchy = false;  // accents
  bool under = false;     // accents
  bool normal = false;    // identifiers forced upright
  std::string props;      // raw props column
};

// What a single literal input character becomes when it has no row of its own.
struct Classification {
  SymbolKind kind;
  std::string value;
  OperatorClass op_class = OperatorClass::Ord;
};

// The token classification table (data/symbols.tsv).
class SymbolTable {
 public:
  static Result<SymbolTable, std::string> parse(std::string_view text);
  static const SymbolTable& builtin();

  const SymbolEntry* find(std::string_view key) const;

  // Table row, then reverse operator lookup, then the documented fallback
  // rule (ASCII letter -> mi, digit -> mn, other ASCII -> mo, else mi).
  Classification classify(std::string_view character) const;

  // Class of an operator by its output text ("−", "∑", "lim").
  OperatorClass operator_class(std::string_view text) const;
  bool has_limits(std::string_view text) const;

  std::size_t size() const { return entries_.size(); }

 private:
  std::map<std::string, SymbolEntry, std::less<>> entries_;
  std::map<std::string, const SymbolEntry*, std::less<>> by_operator_text_;
};

}  // namespace mathrender::mml
