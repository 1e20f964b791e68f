#include "lexer.hpp"

#include <cctype>

namespace palps {

SyntaxError::SyntaxError(std::vector<Diagnostic> d)
    : Error(d.empty() ? std::string("syntax error")
                      : std::to_string(d.front().span.line) + ":" + std::to_string(d.front().span.column) + ": " +
                            d.front().message),
      diagnostics(std::move(d)) {}

namespace detail {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

}  // namespace

std::vector<Token> lex(const std::string& text) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1;
  std::size_t line_start = 0;
  auto span_at = [&](std::size_t b, std::size_t e) {
    return SourceSpan{b, e, line, static_cast<int>(b - line_start) + 1};
  };
  static const char* const multi[] = {"(+)", "->", "<=", ">=", "!="};
  while (i < text.size()) {
    char c = text[i];
    if (c == '\n') {
      ++i;
      ++line;
      line_start = i;
      continue;
    }
    if (c == ' ' || c == '\t' || c == '\r') {
      ++i;
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') ++i;
      continue;
    }
    std::size_t b = i;
    if (ident_start(c)) {
      while (i < text.size() && ident_char(text[i])) ++i;
      out.push_back({Token::Kind::Ident, text.substr(b, i - b), span_at(b, i)});
      continue;
    }
    if (c == '$') {
      ++i;
      while (i < text.size() && ident_char(text[i])) ++i;
      if (i == b + 1) throw SyntaxError({{span_at(b, i), "expected a variable name after '$'"}});
      out.push_back({Token::Kind::Var, text.substr(b, i - b), span_at(b, i)});
      continue;
    }
    if (digit(c)) {
      while (i < text.size() && digit(text[i])) ++i;
      if (i + 1 < text.size() && text[i] == '.' && digit(text[i + 1])) {
        ++i;
        while (i < text.size() && digit(text[i])) ++i;
      }
      if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < text.size() && (text[j] == '-' || text[j] == '+')) ++j;
        if (j < text.size() && digit(text[j])) {
          i = j;
          while (i < text.size() && digit(text[i])) ++i;
        }
      }
      out.push_back({Token::Kind::Number, text.substr(b, i - b), span_at(b, i)});
      continue;
    }
    bool matched = false;
    for (const char* m : multi) {
      std::string s(m);
      if (text.compare(i, s.size(), s) == 0) {
        i += s.size();
        out.push_back({Token::Kind::Punct, s, span_at(b, i)});
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string singles = "{}();:,.?!+-*/=<>@&|";
    if (singles.find(c) != std::string::npos) {
      ++i;
      out.push_back({Token::Kind::Punct, std::string(1, c), span_at(b, i)});
      continue;
    }
    throw SyntaxError({{span_at(b, b + 1), "unexpected character"}});
  }
  out.push_back({Token::Kind::End, "", span_at(text.size(), text.size())});
  return out;
}

}  // namespace detail
}  // namespace palps
