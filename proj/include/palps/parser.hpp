#pragma once

#include "palps/model.hpp"

#include <string>
#include <vector>

namespace palps {

struct SourceSpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  int line = 1;
  int column = 1;
};

struct Diagnostic {
  SourceSpan span;
  std::string message;
};

class SyntaxError : public Error {
 public:
  explicit SyntaxError(std::vector<Diagnostic> d);
  std::vector<Diagnostic> diagnostics;
};

/// Parses a `.palps` model. The policy block is instantiated and closed.
Model parse_model(const std::string& text);

/// Parses a state predicate over the model's species, locations and attributes.
/// `pop` is the total population, `count(s)` the population of one species.
BoolExpr parse_predicate(const Model& m, const std::string& text);
ArithExpr parse_arith(const Model& m, const std::string& text);

std::string format_model(const Model& m);
std::string format_term(const Model& m, TermId t);
std::string format_bool(const Model& m, const BoolExpr& e);
std::string format_arith(const Model& m, const ArithExpr& e);
std::string format_pattern(const Model& m, const LabelPattern& p);

}  // namespace palps
