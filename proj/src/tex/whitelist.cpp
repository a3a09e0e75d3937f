#include "mathrender/tex/whitelist.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "mathrender/embedded_data.hpp"

namespace mathrender::tex {
namespace {

std::vector<std::string_view> split_tabs(std::string_view line) {
  std::vector<std::string_view> cols;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    cols.push_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return cols;
}

bool parse_category(std::string_view s, CommandCategory& out) {
  static constexpr std::pair<std::string_view, CommandCategory> kNames[] = {
      {"symbol", CommandCategory::Symbol},
      {"accent", CommandCategory::Accent},
      {"function-name", CommandCategory::FunctionName},
      {"environment", CommandCategory::Environment},
      {"layout", CommandCategory::Layout},
      {"style", CommandCategory::Style},
      {"semantic-macro", CommandCategory::SemanticMacro},
  };
  for (const auto& [name, cat] : kNames) {
    if (s == name) {
      out = cat;
      return true;
    }
  }
  return false;
}

}  // namespace

std::string_view to_string(CommandCategory c) {
  switch (c) {
    case CommandCategory::Symbol: return "symbol";
    case CommandCategory::Accent: return "accent";
    case CommandCategory::FunctionName: return "function-name";
    case CommandCategory::Environment: return "environment";
    case CommandCategory::Layout: return "layout";
    case CommandCategory::Style: return "style";
    case CommandCategory::SemanticMacro: return "semantic-macro";
  }
  return "?";
}

Result<CommandWhitelist, std::string> CommandWhitelist::parse(std::string_view text) {
  CommandWhitelist wl;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto eol = text.find('\n', pos);
    if (eol == std::string_view::npos) eol = text.size();
    std::string_view line = text.substr(pos, eol - pos);
    pos = eol + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (line.front() == '#') {
      constexpr std::string_view kVersion = "# format-version:";
      if (line.starts_with(kVersion)) {
        auto v = line.substr(kVersion.size());
        while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
        wl.version_ = std::string(v);
      }
      continue;
    }
    const auto cols = split_tabs(line);
    const auto where = "line " + std::to_string(line_no) + ": ";
    if (cols.size() < 3 || cols.size() > 5) return where + "expected 3 to 5 tab-separated columns";
    WhitelistEntry e;
    e.name = std::string(cols[0]);
    if (e.name.empty()) return where + "empty name";
    if (!parse_category(cols[1], e.category)) return where + "unknown category '" + std::string(cols[1]) + "'";
    if (cols[2].size() != 1 || cols[2][0] < '0' || cols[2][0] > '9') return where + "bad arity";
    e.arity = cols[2][0] - '0';
    if (cols.size() > 3) e.expansion = std::string(cols[3]);
    if (cols.size() > 4) e.annotation = std::string(cols[4]);
    if (e.category == CommandCategory::SemanticMacro && e.expansion.empty()) {
      return where + "semantic macro " + e.name + " has no expansion";
    }
    if (!wl.entries_.emplace(e.name, e).second) return where + "duplicate entry " + e.name;
  }
  // Aliases must point at something we accept.
  for (const auto& [name, e] : wl.entries_) {
    if (e.category == CommandCategory::Symbol && !e.expansion.empty() && e.expansion.front() == '\\' &&
        !wl.entries_.contains(e.expansion)) {
      return "alias " + name + " targets unknown " + e.expansion;
    }
  }
  if (wl.version_.empty()) wl.version_ = "0";
  return wl;
}

Result<CommandWhitelist, std::string> CommandWhitelist::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return "cannot open " + path.string();
  std::stringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

const CommandWhitelist& CommandWhitelist::builtin() {
  static const CommandWhitelist wl = [] {
    auto r = parse(data::whitelist_tsv());
    if (!r) throw std::runtime_error("embedded whitelist: " + r.error());
    return std::move(r).value();
  }();
  return wl;
}

const WhitelistEntry* CommandWhitelist::find(std::string_view name) const {
  const auto it = entries_.find(name);
  return it == entries_.end() ? nullptr : &it->second;
}

std::string_view CommandWhitelist::canonical(std::string_view name) const {
  const auto* e = find(name);
  if (e && e->category == CommandCategory::Symbol && !e->expansion.empty()) return e->expansion;
  return name;
}

std::vector<const WhitelistEntry*> CommandWhitelist::entries() const {
  std::vector<const WhitelistEntry*> out;
  for (const auto& [_, e] : entries_) out.push_back(&e);
  return out;
}

std::vector<const WhitelistEntry*> CommandWhitelist::entries(CommandCategory c) const {
  std::vector<const WhitelistEntry*> out;
  for (const auto& [_, e] : entries_) {
    if (e.category == c) out.push_back(&e);
  }
  return out;
}

}  // namespace mathrender::tex
