#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "mathrender/result.hpp"

namespace mathrender::tex {

enum class CommandCategory { Symbol, Accent, FunctionName, Environment, Layout, Style, SemanticMacro };

std::string_view to_string(CommandCategory c);

struct WhitelistEntry {
  std::string name;
  CommandCategory category = CommandCategory::Symbol;
  int arity = 0;
  std::string expansion;   // semantic macro text, or canonical spelling of an alias
  std::string annotation;  // semantic macros only
};

// The set of accepted command and environment names.  Loaded from the
// versioned tab-separated table; lookups are exact and case-sensitive.
class CommandWhitelist {
 public:
  static Result<CommandWhitelist, std::string> parse(std::string_view text);
  static Result<CommandWhitelist, std::string> load(const std::filesystem::path& path);
  // The table compiled into the library (data/whitelist.tsv).
  static const CommandWhitelist& builtin();

  const WhitelistEntry* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }

  // Canonical spelling for a symbol; `name` itself when it is not an alias.
  std::string_view canonical(std::string_view name) const;

  const std::string& version() const { return version_; }
  std::vector<const WhitelistEntry*> entries() const;
  std::vector<const WhitelistEntry*> entries(CommandCategory c) const;

 private:
  std::string version_;
  std::map<std::string, WhitelistEntry, std::less<>> entries_;
};

}  // namespace mathrender::tex
