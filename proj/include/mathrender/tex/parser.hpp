#pragma once

#include <span>
#include <string_view>

#include "mathrender/budget.hpp"
#include "mathrender/result.hpp"
#include "mathrender/tex/ast.hpp"
#include "mathrender/tex/lexer.hpp"
#include "mathrender/tex/whitelist.hpp"

namespace mathrender::tex {

struct ParseOptions {
  std::size_t max_depth = Limits{}.max_depth;
  Budget* budget = nullptr;  // optional cooperative deadline
};

// Builds the validated tree.  Every command is checked against the
// whitelist before any structure is built, so UnknownCommand always lists
// all offenders.
Result<Node, ParseError> parse(std::span<const Token> tokens, const CommandWhitelist& whitelist,
                               const ParseOptions& options = {});

// tokenize + parse.
Result<Node, ParseError> parse(std::string_view input, const CommandWhitelist& whitelist,
                               const Limits& limits = {}, Budget* budget = nullptr);

// Replaces semantic-macro symbols by annotated identifiers.
Node expand_semantic_macros(const Node& ast, const CommandWhitelist& whitelist);

// Canonical TeX for the tree: every argument braced, no insignificant
// whitespace, canonical command spellings.  parse(normalize(t)) == t.
std::string normalize(const Node& ast);

}  // namespace mathrender::tex
