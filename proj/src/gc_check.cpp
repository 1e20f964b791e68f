#include "palps/gc_interp.hpp"
#include "palps/semantics.hpp"

#include <map>
#include <set>

namespace palps::gc {

namespace {

using KeyDist = std::vector<std::pair<StateKey, Rational>>;
using ChoiceSet = std::set<std::pair<bool, KeyDist>>;

constexpr std::size_t kMaxReported = 100;

struct Mapper {
  const Model& m;
  const Semantics& sem;
  const GcLayout& layout;
  const GcModel& g;
  Configuration proto;
  std::vector<int> st, loc;
  std::map<std::pair<int, int>, int> env;  // (species, loc) -> var
  std::vector<int> pool;                   // per species, -1 without replicator

  Mapper(const Model& model, const Semantics& s, const GcLayout& l, const GcModel& gm)
      : m(model), sem(s), layout(l), g(gm), proto(s.initial()) {
    for (std::size_t j = 0; j < layout.modules.size(); ++j) {
      st.push_back(need(layout.state_var(j)));
      loc.push_back(need(layout.loc_var(j)));
    }
    for (std::size_t sp = 0; sp < m.species.size(); ++sp) {
      SpeciesId sid{static_cast<int>(sp)};
      for (int l = 0; l < m.habitat.size(); ++l) env[{static_cast<int>(sp), l}] = need(env_var(m, sid, LocationId{l}));
      pool.push_back(layout.species[sp].has_replicator ? need(pool_var(m, sid)) : -1);
    }
  }

  int need(const std::string& name) const {
    int v = g.find_var(name);
    if (v < 0) throw GcError("translated model lacks variable " + name);
    return v;
  }

  // Builds the calculus configuration for a stable state; problems go to `errs`.
  Configuration config(const State& s, std::vector<std::string>& errs) const {
    Configuration c;
    c.env = Environment(m.habitat.size(), static_cast<int>(m.species.size()));
    std::vector<int> idle(m.species.size(), 0);
    for (std::size_t j = 0; j < layout.modules.size(); ++j) {
      const auto& ml = layout.modules[j];
      const auto& sl = layout.species[ml.species.value];
      auto v = s[st[j]];
      if (v == 0) {
        if (ml.spare) ++idle[ml.species.value];
        continue;
      }
      if (v > sl.normal_states()) {
        errs.push_back("module " + ml.name + " is in a bookkeeping state");
        continue;
      }
      Individual ind;
      ind.id = c.next_id++;
      ind.species = ml.species;
      ind.loc = LocationId{static_cast<int>(s[loc[j]])};
      ind.term = sl.terms[v - 1];
      ind.scope = layout.scope;
      if (sem.alive(ind.term)) c.env.add(ind.species, ind.loc);
      c.individuals.push_back(ind);
    }
    for (auto p : proto.procs) {
      p.remaining = static_cast<int>(s[pool[p.species.value]]);
      if (p.remaining != idle[p.species.value])
        errs.push_back("pool counter " + g.vars[pool[p.species.value]].name + " disagrees with idle spares");
      c.procs.push_back(p);
    }
    for (const auto& [key, var] : env) {
      int want = c.env.count(LocationId{key.second}, SpeciesId{key.first});
      if (s[var] != want)
        errs.push_back("counter " + g.vars[var].name + " is " + std::to_string(s[var]) + ", expected " +
                       std::to_string(want));
    }
    return c;
  }
};

std::string show(const Model& m, const Configuration& c) { return describe_state(m, canonicalize(c)); }

}  // namespace

CorrespondenceReport check_correspondence(const Model& m, std::size_t max_states, bool fault) {
  CorrespondenceReport rep;
  auto note = [&](const std::string& s) {
    if (rep.mismatches.size() < kMaxReported) rep.mismatches.push_back(s);
  };

  GcLayout layout = gc_layout(m);
  GcModel g = parse(emit_prism(m, layout));
  for (const auto& d : g.diagnostics) note("line " + std::to_string(d.line) + ": " + d.message);
  if (fault) inject_fault(g);

  GcMdp gm;
  Quotient q;
  try {
    gm = build(g, max_states);
    if (gm.truncated) {
      rep.gc_states = gm.states.size();
      rep.truncated = true;
      return rep;
    }
    q = quotient(g, gm);
  } catch (const GcError& e) {
    note(std::string("translated model fails: ") + e.what());
    return rep;
  }
  rep.gc_states = gm.states.size();
  rep.gc_stable = q.stable.size();

  Semantics sem(m);
  ExploreLimits lim;
  lim.max_states = max_states;
  lim.use_policy = true;
  Mdp cm = build_mdp(sem, lim);
  rep.calculus_states = cm.size();
  rep.truncated = !cm.complete();

  std::vector<StateKey> ckeys;
  std::map<StateKey, int> cindex;
  for (std::size_t i = 0; i < cm.size(); ++i) {
    ckeys.push_back(canonical_key(cm.states[i]));
    cindex[ckeys.back()] = static_cast<int>(i);
  }

  Mapper mp(m, sem, layout, g);
  std::vector<StateKey> gkeys;
  std::vector<Configuration> gconf;
  for (int s : q.stable) {
    std::vector<std::string> errs;
    gconf.push_back(mp.config(gm.states[s], errs));
    gkeys.push_back(canonical_key(gconf.back()));
    for (const auto& e : errs) note(e + " in " + show(m, gconf.back()));
  }

  std::set<StateKey> covered;
  for (std::size_t i = 0; i < q.stable.size(); ++i) {
    auto it = cindex.find(gkeys[i]);
    if (it == cindex.end()) {
      note("translated state has no calculus counterpart: " + show(m, gconf[i]));
      continue;
    }
    covered.insert(gkeys[i]);
    const int cs = it->second;
    if (cm.truncated[cs]) continue;

    ChoiceSet want, got;
    for (const auto& c : cm.choices[cs]) {
      KeyDist d;
      for (const auto& [t, p] : c.dist) d.push_back({ckeys[t], p});
      std::sort(d.begin(), d.end());
      want.insert({c.is_tick, d});
    }
    for (const auto& [tick, dist] : q.choices[i]) {
      std::map<StateKey, Rational> d;
      for (const auto& [t, p] : dist) d[gkeys[q.position.at(t)]] += p;
      got.insert({tick, KeyDist(d.begin(), d.end())});
    }
    if (want != got)
      note("choices differ in " + show(m, gconf[i]) + ": calculus " + std::to_string(want.size()) +
           ", translated " + std::to_string(got.size()));
  }
  if (!rep.truncated)
    for (std::size_t i = 0; i < cm.size(); ++i)
      if (!covered.count(ckeys[i])) note("calculus state not reached by the translation: " + show(m, cm.states[i]));
  return rep;
}

}  // namespace palps::gc
