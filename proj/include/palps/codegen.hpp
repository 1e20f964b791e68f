#pragma once

#include "palps/model.hpp"

#include <map>
#include <string>
#include <vector>

namespace palps {

class UnsupportedTerm : public Error {
 public:
  using Error::Error;
};

/// State numbering of one species: 0 inactive, 1..n normal states (one per
/// reachable stored term, the dead term included), then the dying and newborn
/// bookkeeping states.
struct SpeciesLayout {
  SpeciesId species;
  std::vector<TermId> terms;  // index k-1 holds the term of state k
  std::map<TermId, int> state_of;
  int done = 0;
  int dying = 0;
  int newborn = 0;
  int replicator_bound = 0;  // inactive modules
  bool has_replicator = false;
  TermId body;  // replicator body

  int normal_states() const { return static_cast<int>(terms.size()); }
  int max_state() const { return newborn; }
};

struct ModuleLayout {
  std::string name;
  SpeciesId species;
  int index = 0;          // within the species, from 1
  int init_state = 0;     // 0 for inactive
  LocationId init_loc;
  bool spare = false;     // inactive at start, activated by replication
  int prev_spare = -1;    // module that must be active before this one
};

struct GcLayout {
  std::vector<SpeciesLayout> species;
  std::vector<ModuleLayout> modules;
  int scope = -1;  // common restriction scope of all components

  std::string state_var(int module) const { return "st_" + modules[module].name; }
  std::string loc_var(int module) const { return "loc_" + modules[module].name; }
};

/// Throws UnsupportedTerm for models outside the translatable fragment.
GcLayout gc_layout(const Model& m);

/// Identifier of the env counter for (species, location).
std::string env_var(const Model& m, SpeciesId s, LocationId l);
std::string pool_var(const Model& m, SpeciesId s);

std::string emit_prism(const Model& m);
/// Each requested channel gets a reward block counting its synchronisations.
std::string emit_prism(const Model& m, const GcLayout& layout, const std::vector<std::string>& reward_channels = {});
/// Unbounded queries are translated; tick-bounded ones are kept as comments.
std::string emit_props(const Model& m, const std::vector<std::string>& queries);

}  // namespace palps
