#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace palps::testing {

/// Random model text: at most 4 individuals and 4 locations, one or two
/// species, random restriction and a random acyclic policy.
std::string random_model(std::mt19937_64& rng);

struct PropertyReport {
  int models = 0;
  std::size_t states = 0;
  std::size_t steps = 0;
  std::vector<std::string> failures;
};

/// Compatibility of env and system along random walks (all successors of
/// every visited state are checked), plus weight normalisation and
/// probabilistic precedence.
PropertyReport check_compatibility(int models, int walk_length, std::uint64_t seed);

/// prioritized ⊆ nondet, every pruned step dominated by an enabled label,
/// and the empty policy prunes nothing.
PropertyReport check_policy_soundness(int models, int walk_length, std::uint64_t seed);

}  // namespace palps::testing
