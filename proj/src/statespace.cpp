#include "palps/statespace.hpp"
#include "palps/parser.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <tuple>

namespace palps {

Configuration canonicalize(const Configuration& c) {
  Configuration out = c;
  std::sort(out.individuals.begin(), out.individuals.end(), [](const Individual& a, const Individual& b) {
    return std::tie(a.species, a.loc, a.term, a.scope) < std::tie(b.species, b.loc, b.term, b.scope);
  });
  for (std::size_t i = 0; i < out.individuals.size(); ++i) out.individuals[i].id = static_cast<int>(i);
  out.next_id = static_cast<int>(out.individuals.size());
  return out;
}

StateKey state_key(const Configuration& c) {
  StateKey k;
  k.reserve(c.individuals.size() * 4 + c.procs.size() + 1);
  k.push_back(static_cast<std::int32_t>(c.individuals.size()));
  for (const auto& ind : c.individuals) {
    k.push_back(ind.species.value);
    k.push_back(ind.loc.value);
    k.push_back(ind.term.value);
    k.push_back(ind.scope);
  }
  for (const auto& p : c.procs) k.push_back(p.remaining);
  return k;
}

bool Mdp::complete() const {
  return std::none_of(truncated.begin(), truncated.end(), [](char t) { return t != 0; });
}

int default_threads() {
  if (const char* v = std::getenv("PALPS_THREADS")) {
    int n = std::atoi(v);
    if (n > 0) return n;
  }
  return 1;
}

namespace {

struct Target {
  Configuration config;
  StateKey key;
  Rational weight;
};

struct PendingChoice {
  ActionLabel label;
  bool is_tick = false;
  bool is_prob = false;
  std::vector<Target> targets;
};

std::vector<PendingChoice> expand(const Semantics& sem, const Configuration& c, bool use_policy) {
  std::vector<PendingChoice> out;
  auto probs = sem.prob_steps(c);
  if (!probs.empty()) {
    PendingChoice pc;
    pc.is_prob = true;
    for (auto& s : probs) {
      auto canon = canonicalize(s.next);
      auto key = state_key(canon);
      auto it = std::find_if(pc.targets.begin(), pc.targets.end(), [&](const Target& t) { return t.key == key; });
      if (it != pc.targets.end())
        it->weight += s.weight;
      else
        pc.targets.push_back({std::move(canon), std::move(key), s.weight});
    }
    out.push_back(std::move(pc));
    return out;
  }
  auto steps = use_policy ? sem.prioritized_steps(c, sem.model().policy) : sem.nondet_steps(c);
  for (auto& s : steps) {
    auto canon = canonicalize(s.next);
    auto key = state_key(canon);
    bool tick = s.label.kind == ActionLabel::Kind::Tick;
    bool dup = std::any_of(out.begin(), out.end(), [&](const PendingChoice& p) {
      return p.label == s.label && p.targets.front().key == key;
    });
    if (dup) continue;
    PendingChoice pc;
    pc.label = s.label;
    pc.is_tick = tick;
    pc.targets.push_back({std::move(canon), std::move(key), Rational(1)});
    out.push_back(std::move(pc));
  }
  return out;
}

struct KeyHash {
  std::size_t operator()(const StateKey& k) const {
    std::size_t h = k.size();
    for (auto v : k) hash_combine(h, std::hash<std::int32_t>{}(v));
    return h;
  }
};

}  // namespace

Mdp build_mdp(const Semantics& sem, const ExploreLimits& limits) {
  Mdp mdp;
  std::unordered_map<StateKey, int, KeyHash> index;
  auto init = canonicalize(sem.initial());
  index.emplace(state_key(init), 0);
  mdp.states.push_back(std::move(init));
  mdp.choices.emplace_back();
  mdp.truncated.push_back(0);

  std::vector<int> frontier{0};
  const int threads = std::max(1, limits.threads);
  while (!frontier.empty()) {
    std::vector<std::vector<PendingChoice>> results(frontier.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < frontier.size();) {
        try {
          results[i] = expand(sem, mdp.states[frontier[i]], limits.use_policy);
        } catch (...) {
          std::lock_guard<std::mutex> lock(failure_mutex);
          if (!failure) failure = std::current_exception();
        }
      }
    };
    if (threads == 1 || frontier.size() < 2) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }
    if (failure) std::rethrow_exception(failure);

    std::vector<int> next_frontier;
    for (std::size_t i = 0; i < frontier.size(); ++i) {
      const int src = frontier[i];
      std::size_t fresh = 0;
      for (const auto& pc : results[i])
        for (const auto& t : pc.targets)
          if (!index.count(t.key)) ++fresh;
      // Over-approximates when targets repeat; keeps the bound strict.
      if (mdp.states.size() + fresh > limits.max_states) {
        mdp.truncated[src] = 1;
        continue;
      }
      for (auto& pc : results[i]) {
        Choice ch;
        ch.label = pc.label;
        ch.is_tick = pc.is_tick;
        ch.is_prob = pc.is_prob;
        for (auto& t : pc.targets) {
          auto [it, inserted] = index.emplace(t.key, static_cast<int>(mdp.states.size()));
          if (inserted) {
            mdp.states.push_back(std::move(t.config));
            mdp.choices.emplace_back();
            mdp.truncated.push_back(0);
            next_frontier.push_back(it->second);
          }
          ch.dist.push_back({it->second, t.weight});
        }
        std::sort(ch.dist.begin(), ch.dist.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        mdp.choices[src].push_back(std::move(ch));
      }
    }
    frontier = std::move(next_frontier);
  }
  return mdp;
}

MdpStats mdp_stats(const Mdp& mdp) {
  MdpStats st;
  st.states = mdp.size();
  for (std::size_t s = 0; s < mdp.size(); ++s) {
    st.choices += mdp.choices[s].size();
    for (const auto& c : mdp.choices[s]) {
      st.transitions += c.dist.size();
      if (c.is_prob) ++st.prob_states;
    }
    if (mdp.truncated[s]) ++st.truncated;
    if (mdp.deadlocked(static_cast<int>(s))) ++st.deadlocks;
  }
  return st;
}

std::string describe_state(const Model& m, const Configuration& c) {
  std::string s;
  for (const auto& ind : c.individuals) {
    if (!s.empty()) s += " | ";
    s += m.species_name(ind.species) + "[" + format_term(m, ind.term) + "]@" + m.location_name(ind.loc);
  }
  for (const auto& p : c.procs) {
    const auto& r = m.species.at(p.species.value).replicators.at(p.replicator);
    s += (s.empty() ? "" : " | ") + std::string("!") + m.channel_name(r.channel) + "=" + std::to_string(p.remaining);
  }
  return s.empty() ? "0" : s;
}

std::string mdp_to_json(const Model& m, const Mdp& mdp) {
  using nlohmann::json;
  json states = json::array();
  for (std::size_t s = 0; s < mdp.size(); ++s) {
    json choices = json::array();
    for (const auto& c : mdp.choices[s]) {
      json dist = json::array();
      for (const auto& [t, p] : c.dist) dist.push_back({{"target", t}, {"prob", to_string(p)}});
      choices.push_back({{"label", c.is_prob ? std::string("prob") : label_to_string(m, c.label)},
                         {"tick", c.is_tick},
                         {"dist", dist}});
    }
    states.push_back({{"id", s},
                      {"state", describe_state(m, mdp.states[s])},
                      {"truncated", mdp.truncated[s] != 0},
                      {"deadlock", mdp.deadlocked(static_cast<int>(s))},
                      {"choices", choices}});
  }
  json root = {{"initial", mdp.initial}, {"states", states}};
  return root.dump(1);
}

}  // namespace palps
