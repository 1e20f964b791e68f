#pragma once

#include "palps/codegen.hpp"
#include "palps/statespace.hpp"

#include <map>
#include <memory>
#include <string>
#include <vector>

namespace palps::gc {

class GcError : public Error {
 public:
  using Error::Error;
};
class ConflictingWrite : public GcError {
 public:
  using GcError::GcError;
};
class RangeViolation : public GcError {
 public:
  using GcError::GcError;
};
class NonConfluentChain : public GcError {
 public:
  using GcError::GcError;
};

using State = std::vector<std::int64_t>;

struct Value {
  bool is_bool = false;
  bool b = false;
  Rational q{0};
};

struct Expr {
  enum class Kind { Num, Bool, Var, Const, Formula, Not, Neg, Bin, Ite, Call };

  Kind kind = Kind::Num;
  Rational num{0};
  bool flag = false;
  int index = -1;       // variable, constant or formula
  std::string op;       // Bin operator or Call name
  std::vector<std::shared_ptr<const Expr>> args;
};
using ExprPtr = std::shared_ptr<const Expr>;

struct Variable {
  std::string name;
  std::int64_t lo = 0, hi = 0, init = 0;
  int module = -1;  // -1 for globals
};

struct Assignment {
  int var = -1;
  ExprPtr value;
};

struct Branch {
  ExprPtr prob;
  std::vector<Assignment> assignments;
};

struct Command {
  std::string label;  // empty for unlabeled
  ExprPtr guard;
  std::vector<Branch> branches;
  int line = 0;
};

struct Module {
  std::string name;
  std::vector<Command> commands;
  std::vector<std::string> alphabet;  // sorted
};

struct Diagnostic {
  int line = 0;
  std::string message;
};

struct GcModel {
  std::vector<Variable> vars;
  std::vector<std::pair<std::string, Value>> constants;
  std::vector<std::pair<std::string, ExprPtr>> formulas;
  std::vector<Module> modules;
  std::map<std::string, ExprPtr> labels;
  std::vector<std::string> reward_names;
  std::vector<Diagnostic> diagnostics;

  int find_var(const std::string& name) const;
};

/// Throws GcError on syntax errors. Semantic issues (unknown names, global
/// writes in synchronised commands, unknown labels) are collected as diagnostics.
GcModel parse(const std::string& text);

struct GcChoice {
  std::string label;
  std::vector<std::pair<int, Rational>> dist;
};

struct GcMdp {
  std::vector<State> states;
  std::vector<std::vector<GcChoice>> choices;
  bool truncated = false;
};

State initial_state(const GcModel& g);
/// Throws GcError on type errors and division by zero.
Value evaluate(const GcModel& g, const Expr& e, const State& s);
/// Enabled choices in `s` under CSP synchronisation on shared labels.
std::vector<std::pair<std::string, std::vector<std::pair<State, Rational>>>> successors(const GcModel& g,
                                                                                        const State& s);
GcMdp build(const GcModel& g, std::size_t max_states);

bool holds(const GcModel& g, const ExprPtr& e, const State& s);

/// Stable-state quotient: bookkeeping chains are followed to the next stable state.
struct Quotient {
  std::vector<int> stable;  // indices into the GcMdp
  std::map<int, int> position;
  std::vector<std::vector<std::pair<bool, std::vector<std::pair<int, Rational>>>>> choices;  // (is_tick, dist)
};
Quotient quotient(const GcModel& g, const GcMdp& mdp);

struct CorrespondenceReport {
  std::size_t gc_states = 0;
  std::size_t gc_stable = 0;
  std::size_t calculus_states = 0;
  std::vector<std::string> mismatches;
  bool truncated = false;

  bool ok() const { return mismatches.empty() && !truncated; }
};

/// Compares the stable quotient of the translated model with the prioritised
/// calculus MDP: same reachable states, same (tick?, distribution) choice sets,
/// and env counters consistent with module states.
CorrespondenceReport check_correspondence(const Model& m, std::size_t max_states, bool inject_fault = false);

/// Negates the guard of the first unlabeled or tick command of the first module.
void inject_fault(GcModel& g);

}  // namespace palps::gc
