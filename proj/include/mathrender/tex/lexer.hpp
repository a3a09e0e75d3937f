#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "mathrender/result.hpp"
#include "mathrender/tex/limits.hpp"
#include "mathrender/tex/parse_error.hpp"

namespace mathrender::tex {

enum class TokenKind {
  Command,          // "\frac", "\{", "\\", "\ "
  Letter,           // ASCII letter
  Digit,            // ASCII digit
  Symbol,           // any other single code point
  OpenBrace,
  CloseBrace,
  SubscriptMark,
  SuperscriptMark,
  Ampersand,
  Whitespace,       // maximal run of ASCII blanks
};

std::string_view to_string(TokenKind kind);

struct Token {
  TokenKind kind;
  std::string text;
  std::size_t offset = 0;

  bool operator==(const Token&) const = default;
};

// Pure lexical split.  Concatenating the token texts reproduces the input.
Result<std::vector<Token>, ParseError> tokenize(std::string_view input, const Limits& limits = {});

}  // namespace mathrender::tex
