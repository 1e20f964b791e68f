#pragma once

#include "palps/parser.hpp"

#include <string>
#include <vector>

namespace palps::detail {

struct Token {
  enum class Kind { Ident, Var, Number, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  SourceSpan span;
};

/// Splits text into tokens; `#` starts a comment. Throws SyntaxError on stray bytes.
std::vector<Token> lex(const std::string& text);

}  // namespace palps::detail
