#pragma once

#include "palps/codegen.hpp"

#include <string>
#include <vector>

namespace palps::detail {

/// One way a stored term resolves at a location: the conjunction of guard
/// outcomes along the conditional path and the head reached.
struct ResolvedHead {
  std::string guard;  // PRISM text, empty when always true
  TermId head;
};

std::string ident(const std::string& name);
std::string prism_arith(const Model& m, const ArithExpr& e);
std::string prism_bool(const Model& m, const BoolExpr& e);
std::string rational_text(const Rational& r);

/// Resolves conditionals statically where possible. Paths on which no guard
/// holds are dropped, as the term is stuck there.
std::vector<ResolvedHead> resolve_heads(const Model& m, TermId t, LocationId here);

std::string conj(const std::vector<std::string>& parts);

}  // namespace palps::detail
