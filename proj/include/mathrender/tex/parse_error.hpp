#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace mathrender::tex {

enum class ParseErrorCode {
  UnknownCommand,
  UnbalancedBraces,
  UnbalancedDelimiters,
  EmptyArgument,
  DoubleScript,
  DepthLimitExceeded,
  InputTooLarge,
  InvalidUtf8,
  Timeout,
};

std::string_view to_string(ParseErrorCode code);

struct ParseError {
  ParseErrorCode code;
  std::string message;
  std::size_t offset = 0;  // byte offset into the input, <= input length
  // Every offending item; for UnknownCommand all unknown commands in
  // order of first appearance.
  std::vector<std::string> offending;
};

}  // namespace mathrender::tex
