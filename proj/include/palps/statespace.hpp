#pragma once

#include "palps/semantics.hpp"

#include <cstddef>
#include <string>
#include <unordered_map>
#include <vector>

namespace palps {

using StateKey = std::vector<std::int32_t>;

/// Sorts individuals by (species, location, term, scope) and renumbers ids.
Configuration canonicalize(const Configuration& c);
/// Key of an already canonical configuration.
StateKey state_key(const Configuration& canonical);
inline StateKey canonical_key(const Configuration& c) { return state_key(canonicalize(c)); }

struct Choice {
  ActionLabel label;
  bool is_tick = false;
  bool is_prob = false;
  std::vector<std::pair<int, Rational>> dist;  // sorted by target
};

struct Mdp {
  std::vector<Configuration> states;
  std::vector<std::vector<Choice>> choices;
  std::vector<char> truncated;
  int initial = 0;

  std::size_t size() const { return states.size(); }
  bool deadlocked(int s) const { return choices[s].empty() && !truncated[s]; }
  bool complete() const;
};

struct ExploreLimits {
  std::size_t max_states = 1000000;
  bool use_policy = true;
  int threads = 1;
};

struct MdpStats {
  std::size_t states = 0;
  std::size_t choices = 0;
  std::size_t transitions = 0;
  std::size_t deadlocks = 0;
  std::size_t truncated = 0;
  std::size_t prob_states = 0;
};

/// Breadth-first exploration. Successors are computed in parallel and inserted
/// in a fixed order, so state numbering does not depend on the thread count.
/// States beyond `max_states` are not expanded and are flagged truncated.
Mdp build_mdp(const Semantics& sem, const ExploreLimits& limits);

MdpStats mdp_stats(const Mdp& mdp);

std::string describe_state(const Model& m, const Configuration& c);
std::string mdp_to_json(const Model& m, const Mdp& mdp);

/// Default worker count: PALPS_THREADS if set, else 1.
int default_threads();

}  // namespace palps
