#pragma once

#include "palps/statespace.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace palps {

class QueryError : public Error {
 public:
  using Error::Error;
};

enum class Opt { Max, Min, Unique };

/// `P[op]=? [F<=k phi]`, `P[op]=? [phi U<=k psi]`, `R{"name"}[op]=? [C<=k]`,
/// `R{"name"}[op]=? [I=k]`, `R{"name"}[op]=? [F phi]`. Bounds count ticks.
struct Query {
  enum class Kind { Until, Cumulative, Instant, ReachReward };

  Kind kind = Kind::Until;
  Opt opt = Opt::Max;
  BoolExpr left = BoolExpr::truth();
  BoolExpr right = BoolExpr::truth();
  std::optional<int> bound;
  std::string reward;
};

Query parse_query(const Model& m, const std::string& text);

struct QueryResult {
  double value = 0.0;
  std::size_t iterations = 0;
  /// Truncated states were reached; the value covers only the explored part.
  bool partial = false;
};

struct SolverOptions {
  double epsilon = 1e-10;
  std::size_t max_iterations = 1000000;
};

QueryResult check_query(const Mdp& mdp, const Model& m, const Query& q, const SolverOptions& opt = {});

/// Per-state vectors, exposed for testing.
std::vector<double> reach_probability(const Mdp& mdp, const std::vector<char>& left, const std::vector<char>& right,
                                      Opt opt, std::optional<int> ticks, const SolverOptions& so = {});
std::vector<double> cumulative_reward(const Mdp& mdp, const Model& m, const RewardDef& r, Opt opt, int ticks);
std::vector<double> instant_reward(const Mdp& mdp, const Model& m, const RewardDef& r, Opt opt, int ticks);

std::vector<char> satisfying(const Mdp& mdp, const Model& m, const BoolExpr& e);
double state_reward(const Model& m, const RewardDef& r, const Configuration& c);
double action_reward(const RewardDef& r, const ActionLabel& a);

// Simulation

enum class Scheduler { Uniform, Ordered };

struct SimOptions {
  int ticks = 10;
  std::uint64_t seed = 1;
  Scheduler scheduler = Scheduler::Uniform;
  bool use_policy = true;
  std::size_t max_steps_per_tick = 1000000;
};

struct Trace {
  std::vector<Environment> env;  // env[t] after t ticks
  int deadlock_tick = -1;        // round in which no step was enabled
  std::size_t steps = 0;
};

Trace simulate(const Semantics& sem, const SimOptions& opt);

struct RunSummary {
  int run = 0;
  std::uint64_t seed = 0;
  int final_population = 0;
  int deadlock_tick = -1;
};

struct BatchResult {
  std::vector<RunSummary> runs;
  std::vector<double> mean_population;  // per tick, deadlocked runs frozen
};

/// Run i uses seed `opt.seed + i`; results do not depend on `threads`.
BatchResult simulate_batch(const Semantics& sem, const SimOptions& opt, int runs, int threads);

void write_trace_csv(std::ostream& os, const Model& m, const Trace& t);
void write_batch_csv(std::ostream& os, const BatchResult& b);
void write_mean_csv(std::ostream& os, const BatchResult& b);

}  // namespace palps
