#include "mathrender/mml/symbol_table.hpp"

#include <stdexcept>
#include <vector>

#include "mathrender/embedded_data.hpp"
#include "mathrender/utf8.hpp"

namespace mathrender::mml {
namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

bool parse_kind(std::string_view s, SymbolKind& out) {
  static const std::pair<std::string_view, SymbolKind> kinds[] = {
      {"mi", SymbolKind::Identifier},   {"mo", SymbolKind::Operator}, {"mspace", SymbolKind::Space},
      {"function", SymbolKind::Function}, {"accent", SymbolKind::Accent}, {"variant", SymbolKind::Variant},
      {"text", SymbolKind::Text},       {"env", SymbolKind::Environment},
  };
  for (const auto& [name, kind] : kinds) {
    if (s == name) {
      out = kind;
      return true;
    }
  }
  return false;
}

bool parse_class(std::string_view s, OperatorClass& out) {
  static const std::pair<std::string_view, OperatorClass> classes[] = {
      {"ord", OperatorClass::Ord},     {"bin", OperatorClass::Bin},     {"rel", OperatorClass::Rel},
      {"open", OperatorClass::Open},   {"close", OperatorClass::Close}, {"punct", OperatorClass::Punct},
      {"large", OperatorClass::Large}, {"fence", OperatorClass::Fence}, {"apply", OperatorClass::Apply},
  };
  for (const auto& [name, c] : classes) {
    if (s == name) {
      out = c;
      return true;
    }
  }
  return false;
}

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }

}  // namespace

std::string_view to_string(OperatorClass c) {
  switch (c) {
    case OperatorClass::Ord: return "ord";
    case OperatorClass::Bin: return "bin";
    case OperatorClass::Rel: return "rel";
    case OperatorClass::Open: return "open";
    case OperatorClass::Close: return "close";
    case OperatorClass::Punct: return "punct";
    case OperatorClass::Large: return "large";
    case OperatorClass::Fence: return "fence";
    case OperatorClass::Apply: return "apply";
  }
  return "?";
}

Result<SymbolTable, std::string> SymbolTable::parse(std::string_view text) {
  SymbolTable table;
  std::size_t line_no = 0;
  for (std::string_view line : split(text, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || (line.front() == '#' && (line.size() == 1 || line[1] != '\t'))) continue;
    const auto where = "line " + std::to_string(line_no) + ": ";
    const auto cols = split(line, '\t');
    if (cols.size() < 3 || cols.size() > 4) return where + "expected 3 or 4 tab-separated columns";
    SymbolEntry e;
    e.key = cols[0];
    if (e.key.empty()) return where + "empty key";
    if (!parse_kind(cols[1], e.kind)) return where + "unknown kind '" + std::string(cols[1]) + "'";
    e.value = cols[2];
    e.props = cols.size() > 3 ? std::string(cols[3]) : std::string();
    const auto props = split(e.props, ',');
    switch (e.kind) {
      case SymbolKind::Operator:
        if (!parse_class(props.front(), e.op_class)) return where + "unknown operator class '" + e.props + "'";
        for (std::size_t i = 1; i < props.size(); ++i) {
          if (props[i] == "limits") {
            e.limits = true;
          } else if (props[i] == "stretchy") {
            e.stretchy = true;
          } else {
            return where + "unknown operator flag '" + std::string(props[i]) + "'";
          }
        }
        break;
      case SymbolKind::Identifier:
        e.normal = e.props == "normal";
        break;
      case SymbolKind::Function:
        e.limits = e.props == "limits";
        break;
      case SymbolKind::Accent:
        if (props.front() != "over" && props.front() != "under") return where + "accent needs over or under";
        e.under = props.front() == "under";
        e.stretchy = props.size() > 1 && props[1] == "stretchy";
        break;
      case SymbolKind::Space: {
        int ignored = 0;
        try {
          ignored = std::stoi(e.value);
        } catch (const std::exception&) {
          return where + "space width is not an integer";
        }
        (void)ignored;
        break;
      }
      case SymbolKind::Variant:
      case SymbolKind::Text:
      case SymbolKind::Environment:
        break;
    }
    const std::string key = e.key;
    if (!table.entries_.emplace(key, std::move(e)).second) return where + "duplicate key " + key;
  }
  for (const auto& [key, e] : table.entries_) {
    if (e.kind == SymbolKind::Operator) table.by_operator_text_.emplace(e.value, &e);
    if (e.kind == SymbolKind::Function && e.limits) table.by_operator_text_.emplace(e.value, &e);
  }
  return table;
}

const SymbolTable& SymbolTable::builtin() {
  static const SymbolTable table = [] {
    auto r = SymbolTable::parse(data::symbols_tsv());
    if (!r) throw std::runtime_error("embedded symbol table: " + r.error());
    return std::move(r.value());
  }();
  return table;
}

const SymbolEntry* SymbolTable::find(std::string_view key) const {
  auto it = entries_.find(key);
  return it == entries_.end() ? nullptr : &it->second;
}

Classification SymbolTable::classify(std::string_view character) const {
  if (const SymbolEntry* e = find(character)) return {e->kind, e->value, e->op_class};
  auto it = by_operator_text_.find(character);
  if (it != by_operator_text_.end() && it->second->kind == SymbolKind::Operator) {
    return {SymbolKind::Operator, std::string(character), it->second->op_class};
  }
  if (character.size() == 1) {
    const char c = character.front();
    if (is_ascii_letter(c)) return {SymbolKind::Identifier, std::string(character)};
    if (c >= '0' && c <= '9') return {SymbolKind::Identifier, std::string(character)};  // callers emit mn
    return {SymbolKind::Operator, std::string(character), OperatorClass::Ord};
  }
  return {SymbolKind::Identifier, std::string(character)};
}

OperatorClass SymbolTable::operator_class(std::string_view text) const {
  auto it = by_operator_text_.find(text);
  if (it == by_operator_text_.end()) return OperatorClass::Ord;
  // Limits-style function names (lim, max, ...) behave as large operators.
  return it->second->kind == SymbolKind::Function ? OperatorClass::Large : it->second->op_class;
}

bool SymbolTable::has_limits(std::string_view text) const {
  auto it = by_operator_text_.find(text);
  return it != by_operator_text_.end() && it->second->limits;
}

}  // namespace mathrender::mml
