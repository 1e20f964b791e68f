#pragma once

#include "palps/core.hpp"
#include "palps/expr.hpp"

#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace palps {

class Habitat {
 public:
  LocationId add_location(const std::string& name);
  /// Adds both directions. Self-loops are recorded and reported by validation.
  void connect(LocationId a, LocationId b);

  LocationId find(const std::string& name) const;
  int size() const { return static_cast<int>(names_.size()); }
  const std::string& name(LocationId l) const { return names_.at(l.value); }
  const std::vector<std::string>& names() const { return names_; }
  /// Sorted by id.
  const std::vector<LocationId>& neighbors(LocationId l) const { return neighbors_.at(l.value); }
  bool adjacent(LocationId a, LocationId b) const;
  bool has_self_loop() const { return self_loop_; }

  bool operator==(const Habitat&) const = default;

 private:
  std::vector<std::string> names_;
  std::vector<std::vector<LocationId>> neighbors_;
  bool self_loop_ = false;
};

enum class PrefixKind { Tick, In, Out, Go };

struct Prefix {
  PrefixKind kind = PrefixKind::Tick;
  ChannelId channel;
  LocationId target;

  static Prefix tick() { return Prefix{}; }
  static Prefix in(ChannelId c) { return Prefix{PrefixKind::In, c, LocationId{}}; }
  static Prefix out(ChannelId c) { return Prefix{PrefixKind::Out, c, LocationId{}}; }
  static Prefix go(LocationId l) { return Prefix{PrefixKind::Go, ChannelId{}, l}; }
  bool operator==(const Prefix&) const = default;
};

/// Nil, NSum, PSum, Cond and ConstRef as in the calculus. GoUniform(T) is the
/// `disperse uniform nb(myloc) then T` form: a uniform PSum over `go l'.T`
/// for every neighbor l' of the current location.
enum class TermKind { Nil, NSum, PSum, Cond, Const, GoUniform };

struct TermNode {
  TermKind kind = TermKind::Nil;
  std::vector<std::pair<Prefix, TermId>> actions;
  std::vector<std::pair<Rational, TermId>> branches;
  std::vector<std::pair<BoolExpr, TermId>> guards;
  SpeciesId species;
  int constant = -1;
  TermId cont;

  bool operator==(const TermNode&) const = default;
};

/// Hash-consed term arena: structurally equal nodes share one id.
class TermPool {
 public:
  TermId intern(const TermNode& node);
  /// Lookup without inserting; invalid id when absent.
  TermId find(const TermNode& node) const;
  TermId nil();
  TermId prefix(Prefix p, TermId cont);
  TermId const_ref(SpeciesId s, int constant);
  const TermNode& at(TermId id) const { return nodes_.at(id.value); }
  int size() const { return static_cast<int>(nodes_.size()); }

 private:
  std::vector<TermNode> nodes_;
  std::unordered_map<std::size_t, std::vector<std::int32_t>> index_;
};

struct Replicator {
  ChannelId channel;
  int bound = 0;
  int body = -1;  // constant index within the species
};

struct SpeciesDef {
  std::string name;
  std::vector<std::string> constant_names;
  std::vector<TermId> constant_bodies;  // invalid id while undefined
  std::vector<Replicator> replicators;

  int find_constant(const std::string& n) const;
};

struct SystemNode {
  enum class Kind { Located, SpeciesProc, Parallel, Restrict };

  Kind kind = Kind::Parallel;
  TermId term;
  SpeciesId species;
  LocationId location;
  int multiplicity = 1;
  int replicator = 0;
  std::vector<SystemNode> children;
  std::vector<ChannelId> channels;
};

struct ActionLabel {
  enum class Kind { In, Out, Tau, Tick };

  Kind kind = Kind::Tick;
  bool go = false;
  ChannelId channel;
  LocationId loc;
  SpeciesId species;

  static ActionLabel tick() { return ActionLabel{}; }
  static ActionLabel in(ChannelId c, LocationId l, SpeciesId s) { return {Kind::In, false, c, l, s}; }
  static ActionLabel out(ChannelId c, LocationId l, SpeciesId s) { return {Kind::Out, false, c, l, s}; }
  static ActionLabel tau(ChannelId c, LocationId l, SpeciesId s) { return {Kind::Tau, false, c, l, s}; }
  static ActionLabel tau_go(LocationId l, SpeciesId s) { return {Kind::Tau, true, ChannelId{}, l, s}; }

  auto operator<=>(const ActionLabel&) const = default;
};

/// One position of a label pattern: a fixed id, or a variable name.
struct PatternSlot {
  int fixed = -1;
  std::string var;

  bool is_var() const { return !var.empty(); }
  bool operator==(const PatternSlot&) const = default;
};

struct LabelPattern {
  ActionLabel::Kind kind = ActionLabel::Kind::Tick;
  bool go = false;
  ChannelId channel;
  PatternSlot loc;
  PatternSlot species;

  bool matches(const ActionLabel& a) const;
  bool operator==(const LabelPattern&) const = default;
};

struct PolicyPattern {
  LabelPattern lower;
  LabelPattern higher;
  bool operator==(const PolicyPattern&) const = default;
};

using LabelPair = std::pair<ActionLabel, ActionLabel>;

class CycleError : public Error {
 public:
  CycleError(const std::string& what, std::vector<ActionLabel> witness)
      : Error(what), cycle(std::move(witness)) {}
  std::vector<ActionLabel> cycle;
};

/// Transitively closed, irreflexive set of (lower, higher) pairs.
class Policy {
 public:
  Policy() = default;

  const std::set<LabelPair>& pairs() const { return pairs_; }
  bool empty() const { return pairs_.empty(); }
  bool contains(const ActionLabel& lower, const ActionLabel& higher) const {
    return pairs_.count({lower, higher}) > 0;
  }
  /// Labels strictly above `a`.
  const std::vector<ActionLabel>& higher_than(const ActionLabel& a) const;
  /// True if some label above `a` is in `enabled`.
  bool dominated(const ActionLabel& a, const std::set<ActionLabel>& enabled) const;
  /// Labels that occur as the higher side of some pair.
  const std::set<ActionLabel>& higher_labels() const { return higher_set_; }

  std::vector<PolicyPattern> patterns;

  friend Policy policy_closure(const std::set<LabelPair>& raw);

 private:
  std::set<LabelPair> pairs_;
  std::map<ActionLabel, std::vector<ActionLabel>> above_;
  std::set<ActionLabel> higher_set_;
};

/// Throws CycleError on (a, a) in the closure, Error on a tick/tick pair.
Policy policy_closure(const std::set<LabelPair>& raw);

struct RewardDef {
  std::string name;
  std::vector<std::pair<LabelPattern, Rational>> actions;
  std::vector<std::pair<BoolExpr, ArithExpr>> states;
  bool operator==(const RewardDef&) const = default;
};

struct Model {
  Habitat habitat;
  AttributeTable attributes;
  std::vector<SpeciesDef> species;
  std::vector<std::string> channels;
  TermPool terms;
  SystemNode system;
  Policy policy;
  std::vector<RewardDef> rewards;

  SpeciesId find_species(const std::string& name) const;
  ChannelId find_channel(const std::string& name) const;
  ChannelId channel(const std::string& name);
  const std::string& channel_name(ChannelId c) const { return channels.at(c.value); }
  const std::string& species_name(SpeciesId s) const { return species.at(s.value).name; }
  const std::string& location_name(LocationId l) const { return habitat.name(l); }
  const RewardDef* find_reward(const std::string& name) const;

  /// Follows ConstRef nodes; returns an invalid id on an unguarded cycle or undefined constant.
  TermId unfold(TermId t) const;
  TermId replicator_body(SpeciesId s, int replicator) const;
};

std::string label_to_string(const Model& m, const ActionLabel& a);

Policy instantiate_wildcards(const std::vector<PolicyPattern>& patterns, const Model& m);

struct Finding {
  enum class Severity { Error, Warning };
  Severity severity;
  std::string message;
};

struct ValidationReport {
  std::vector<Finding> findings;

  bool ok() const;
  std::vector<std::string> errors() const;
  std::vector<std::string> warnings() const;
};

ValidationReport validate_model(const Model& m);

/// Structural equality up to term-id numbering.
bool structurally_equal(const Model& a, const Model& b);

/// Interns the runtime forms the semantics needs (one `go l'.T` per uniform
/// dispersal and location). parse_model calls it; hand-built models must too.
void finalize_model(Model& m);

}  // namespace palps
