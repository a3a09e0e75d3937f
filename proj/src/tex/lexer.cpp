#include "mathrender/tex/lexer.hpp"

#include "mathrender/utf8.hpp"

namespace mathrender::tex {
namespace {

bool is_ascii_letter(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z'); }
bool is_blank(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

}  // namespace

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Command: return "command";
    case TokenKind::Letter: return "letter";
    case TokenKind::Digit: return "digit";
    case TokenKind::Symbol: return "symbol";
    case TokenKind::OpenBrace: return "open-brace";
    case TokenKind::CloseBrace: return "close-brace";
    case TokenKind::SubscriptMark: return "subscript-mark";
    case TokenKind::SuperscriptMark: return "superscript-mark";
    case TokenKind::Ampersand: return "ampersand";
    case TokenKind::Whitespace: return "whitespace";
  }
  return "?";
}

std::string_view to_string(ParseErrorCode code) {
  switch (code) {
    case ParseErrorCode::UnknownCommand: return "UnknownCommand";
    case ParseErrorCode::UnbalancedBraces: return "UnbalancedBraces";
    case ParseErrorCode::UnbalancedDelimiters: return "UnbalancedDelimiters";
    case ParseErrorCode::EmptyArgument: return "EmptyArgument";
    case ParseErrorCode::DoubleScript: return "DoubleScript";
    case ParseErrorCode::DepthLimitExceeded: return "DepthLimitExceeded";
    case ParseErrorCode::InputTooLarge: return "InputTooLarge";
    case ParseErrorCode::InvalidUtf8: return "InvalidUtf8";
    case ParseErrorCode::Timeout: return "Timeout";
  }
  return "?";
}

Result<std::vector<Token>, ParseError> tokenize(std::string_view input, const Limits& limits) {
  if (input.size() > limits.max_input_bytes) {
    return ParseError{ParseErrorCode::InputTooLarge,
                      "input is " + std::to_string(input.size()) + " bytes; limit is " +
                          std::to_string(limits.max_input_bytes),
                      limits.max_input_bytes,
                      {}};
  }
  if (auto bad = utf8::first_invalid(input)) {
    return ParseError{ParseErrorCode::InvalidUtf8, "malformed UTF-8 sequence", *bad, {}};
  }

  std::vector<Token> tokens;
  tokens.reserve(input.size());
  std::size_t i = 0;
  const std::size_t n = input.size();
  while (i < n) {
    const std::size_t start = i;
    const char c = input[i];
    TokenKind kind;
    if (c == '\\') {
      kind = TokenKind::Command;
      ++i;
      if (i < n && is_ascii_letter(input[i])) {
        while (i < n && is_ascii_letter(input[i])) ++i;
      } else if (i < n) {
        i += utf8::sequence_length(static_cast<unsigned char>(input[i]));
      }
    } else if (is_blank(c)) {
      kind = TokenKind::Whitespace;
      while (i < n && is_blank(input[i])) ++i;
    } else {
      ++i;
      switch (c) {
        case '{': kind = TokenKind::OpenBrace; break;
        case '}': kind = TokenKind::CloseBrace; break;
        case '_': kind = TokenKind::SubscriptMark; break;
        case '^': kind = TokenKind::SuperscriptMark; break;
        case '&': kind = TokenKind::Ampersand; break;
        default:
          if (is_ascii_letter(c)) {
            kind = TokenKind::Letter;
          } else if (c >= '0' && c <= '9') {
            kind = TokenKind::Digit;
          } else {
            kind = TokenKind::Symbol;
            i = start + utf8::sequence_length(static_cast<unsigned char>(c));
          }
      }
    }
    tokens.push_back(Token{kind, std::string(input.substr(start, i - start)), start});
  }
  return tokens;
}

}  // namespace mathrender::tex
