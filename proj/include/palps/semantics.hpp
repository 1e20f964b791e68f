#pragma once

#include "palps/model.hpp"

#include <optional>
#include <vector>

namespace palps {

/// A located individual. `term` is stored with constants unfolded.
struct Individual {
  int id = 0;
  SpeciesId species;
  LocationId loc;
  TermId term;
  int scope = -1;  // innermost enclosing restriction, -1 for none

  bool operator==(const Individual&) const = default;
};

/// A species process `!rep.P` with its remaining activation budget.
struct ReplicatorProc {
  SpeciesId species;
  int replicator = 0;
  int remaining = 0;
  int scope = -1;

  bool operator==(const ReplicatorProc&) const = default;
};

struct Configuration {
  Environment env;
  std::vector<Individual> individuals;
  std::vector<ReplicatorProc> procs;
  int next_id = 0;
};

/// Env counts equal the non-Nil individuals per (species, location).
bool compatible(const Model& m, const Configuration& c);

/// Description of one nondeterministic step. Applying it to the configuration
/// it was computed from yields the successor.
struct Move {
  enum class Kind { Tick, Single, Sync, Rep };

  Kind kind = Kind::Tick;
  ActionLabel label;
  int a = -1;          // individual index (outputter for Sync and Rep)
  int b = -1;          // partner individual index (Sync) or proc index (Rep)
  TermId a_next, b_next;
  LocationId a_loc;    // new location of `a`
  std::vector<TermId> tick_next;  // Tick: next term per individual
};

struct NondetStep {
  ActionLabel label;
  Configuration next;
  std::vector<int> participants;  // individual ids
};

struct ProbStep {
  Rational weight;
  Configuration next;
};

/// Outcomes of one probabilistic individual: (probability, next term, next location).
struct ProbOption {
  Rational p;
  TermId next;
  LocationId loc;
};

struct ProbChoice {
  int index = -1;  // individual index
  std::vector<ProbOption> options;
};

struct SemanticsOptions {
  /// Ignore replicator bounds.
  bool unbounded_replication = false;
};

class Semantics {
 public:
  explicit Semantics(const Model& m, SemanticsOptions opt = {});

  const Model& model() const { return m_; }

  Configuration initial() const;

  /// Head of a term at a location after resolving Const and Cond. Invalid id
  /// when no guard holds. Evaluation errors propagate.
  TermId head(TermId t, LocationId loc, const Environment& env) const;

  /// Per-individual distributions; non-empty iff a probabilistic step is due.
  std::vector<ProbChoice> prob_choices(const Configuration& c) const;
  /// Enabled nondeterministic moves (empty while a probabilistic step is due).
  std::vector<Move> moves(const Configuration& c) const;

  Configuration apply(const Configuration& c, const Move& mv) const;
  /// `picks[i]` selects an option of `choices[i]`.
  Configuration apply_prob(const Configuration& c, const std::vector<ProbChoice>& choices,
                           const std::vector<int>& picks) const;
  std::vector<int> participants(const Configuration& c, const Move& mv) const;

  std::vector<NondetStep> nondet_steps(const Configuration& c) const;
  std::vector<ProbStep> prob_steps(const Configuration& c) const;
  /// Nondeterministic steps whose label is not dominated by another enabled label.
  std::vector<NondetStep> prioritized_steps(const Configuration& c, const Policy& p) const;

  /// Whether a sync on `ch` between the given scopes escapes no restriction.
  bool sync_allowed(ChannelId ch, int scope_a, int scope_b) const;
  /// Whether a standalone action on `ch` is observable from the top level.
  bool visible(ChannelId ch, int scope) const;

  bool alive(TermId t) const { return m_.terms.at(t).kind != TermKind::Nil; }
  /// `go l . cont` as interned by finalize_model.
  TermId go_term(LocationId l, TermId cont) const;

 private:
  const Model& m_;
  SemanticsOptions opt_;
  std::vector<int> scope_parent_;
  std::vector<std::vector<int>> scope_chain_;       // scope -> itself and ancestors
  std::vector<std::vector<bool>> scope_restricts_;  // scope -> channel -> restricted here
  Configuration initial_;

  void collect(const SystemNode& n, int scope, Configuration& c);
  bool restricted_in(int scope, ChannelId ch) const;
};

}  // namespace palps
