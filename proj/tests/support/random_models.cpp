#include "random_models.hpp"

#include "palps/parser.hpp"
#include "palps/semantics.hpp"
#include "palps/statespace.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace palps::testing {

namespace {

struct Gen {
  std::mt19937_64& rng;
  int locations = 1;
  int procs = 1;
  bool replicator = false;

  int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng); }
  bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng); }

  std::string loc(int i) const { return "l" + std::to_string(i + 1); }
  std::string proc() { return "P" + std::to_string(pick(procs)); }

  std::string leaf() {
    switch (pick(4)) {
      case 0: return "0";
      case 1: return "tick.0";
      case 2: return "tick." + proc();
      default: return std::string(coin() ? "a" : "b") + (coin() ? "?." : "!.") + proc();
    }
  }

  static std::string wrap(const std::string& t) {
    return t.find_first_of(" ") == std::string::npos ? t : "(" + t + ")";
  }

  std::string prefix() {
    int n = replicator ? 6 : 5;
    switch (pick(n)) {
      case 0: return "tick.";
      case 1: return "a?.";
      case 2: return "a!.";
      case 3: return "b?.";
      case 4: return "go " + loc(pick(locations)) + " . ";
      default: return "rep!.";
    }
  }

  // A term that starts with a prefix or is 0.
  std::string prefixed(int depth) {
    if (depth <= 0 || coin(0.25)) return leaf();
    return prefix() + wrap(term(depth - 1));
  }

  std::string term(int depth) {
    if (depth <= 0) return leaf();
    switch (pick(6)) {
      case 0: return prefixed(depth);
      case 1: {
        std::string a = prefixed(depth - 1), b = prefixed(depth - 1);
        if (a == "0" || b == "0" || a.rfind("tick", 0) == 0 || b.rfind("tick", 0) == 0) return prefixed(depth);
        return a + " + " + b;
      }
      case 2: {
        int num = 1 + pick(4);
        return std::to_string(num) + "/5: " + prefixed(depth - 1) + " (+) " + std::to_string(5 - num) + "/5: " +
               prefixed(depth - 1);
      }
      case 3: {
        const char* op = coin() ? ">=" : "=";
        return "cond(s@myloc " + std::string(op) + " " + std::to_string(1 + pick(2)) + " -> " + prefixed(depth - 1) +
               "; true -> " + prefixed(depth - 1) + ")";
      }
      case 4: return "disperse uniform nb(myloc) then " + prefixed(depth - 1);
      default: return prefixed(depth);
    }
  }
};

}  // namespace

std::string random_model(std::mt19937_64& rng) {
  Gen g{rng};
  g.locations = 1 + g.pick(4);
  g.procs = 1 + g.pick(3);
  g.replicator = g.coin();
  const int species = 1 + g.pick(2);
  const char* names[] = {"s", "t"};

  std::ostringstream os;
  os << "locations: ";
  for (int l = 0; l < g.locations; ++l) os << (l ? ", " : "") << g.loc(l);
  os << ";\n";
  std::vector<std::string> edges;
  for (int a = 0; a < g.locations; ++a)
    for (int b = a + 1; b < g.locations; ++b)
      if (g.coin(0.6)) edges.push_back(g.loc(a) + "-" + g.loc(b));
  if (!edges.empty()) {
    os << "neighbors: ";
    for (std::size_t i = 0; i < edges.size(); ++i) os << (i ? ", " : "") << edges[i];
    os << ";\n";
  }
  os << "channels: a, b" << (g.replicator ? ", rep" : "") << ";\n";

  for (int s = 0; s < species; ++s) {
    const bool rep = g.replicator && s == 0;
    Gen sg = g;
    sg.replicator = rep;
    os << "\nspecies " << names[s] << " {\n";
    for (int p = 0; p < g.procs; ++p) os << "  process P" << p << " = " << sg.term(1 + g.pick(3)) << ";\n";
    if (rep) os << "  bound " << 1 + g.pick(2) << ";\n  init P" << g.pick(g.procs) << ";\n";
    os << "}\n";
  }

  const int individuals = 1 + g.pick(4);
  os << "\nsystem {\n";
  for (int i = 0; i < individuals; ++i)
    os << "  1 of " << names[g.pick(species)] << ".P" << g.pick(g.procs) << " at " << g.loc(g.pick(g.locations))
       << ";\n";
  if (g.replicator) os << "  replicator s;\n";
  os << "}";
  std::vector<std::string> restricted;
  if (g.replicator) restricted.push_back("rep");
  if (g.coin()) restricted.push_back("a");
  if (g.coin()) restricted.push_back("b");
  if (!restricted.empty()) {
    os << " restrict { ";
    for (std::size_t i = 0; i < restricted.size(); ++i) os << (i ? ", " : "") << restricted[i];
    os << " }";
  }
  os << "\n";

  // Policy: pairs follow a random ranking of label patterns, so it stays acyclic.
  std::vector<std::string> pats;
  for (int s = 0; s < species; ++s) {
    std::string sp = names[s];
    for (const char* p : {"tau(a, $x, ", "tau(go, $x, ", "in(a, $x, ", "out(b, *, ", "tau(b, *, "})
      pats.push_back(p + sp + ")");
    if (g.replicator && s == 0) pats.push_back("tau(rep, $x, s)");
  }
  std::shuffle(pats.begin(), pats.end(), rng);
  const int pairs = g.pick(4);
  if (pairs > 0) {
    os << "\npolicy {\n";
    std::set<std::pair<int, int>> used;
    for (int k = 0; k < pairs; ++k) {
      int lo = g.pick(static_cast<int>(pats.size())), hi = g.pick(static_cast<int>(pats.size()));
      if (lo == hi) continue;
      if (lo > hi) std::swap(lo, hi);
      if (!used.insert({lo, hi}).second) continue;
      auto higher = pats[hi];
      if (g.coin()) {
        auto at = higher.find("$x");
        if (at != std::string::npos) higher.replace(at, 2, "$y");
      }
      os << "  " << pats[lo] << " < " << higher << ";\n";
    }
    os << "}\n";
  }
  return os.str();
}

namespace {

using StepKey = std::pair<ActionLabel, StateKey>;

template <class Check>
PropertyReport run_walks(int models, int walk_length, std::uint64_t seed, Check check) {
  PropertyReport rep;
  std::mt19937_64 rng(seed);
  for (int i = 0; i < models; ++i) {
    const std::string text = random_model(rng);
    try {
      Model m = parse_model(text);
      auto v = validate_model(m);
      if (!v.ok()) {
        rep.failures.push_back("generated model rejected: " + v.errors().front() + "\n" + text);
        continue;
      }
      Semantics sem(m);
      Configuration c = sem.initial();
      ++rep.models;
      for (int step = 0; step <= walk_length; ++step) {
        ++rep.states;
        std::string why = check(m, sem, c, rep.steps);
        if (!why.empty()) {
          rep.failures.push_back(why + " (model " + std::to_string(i) + ", step " + std::to_string(step) + ")\n" +
                                 text);
          break;
        }
        auto probs = sem.prob_steps(c);
        if (!probs.empty()) {
          std::vector<double> w;
          for (const auto& p : probs) w.push_back(to_double(p.weight));
          c = probs[std::discrete_distribution<std::size_t>(w.begin(), w.end())(rng)].next;
          continue;
        }
        auto steps = sem.prioritized_steps(c, m.policy);
        if (steps.empty()) break;
        c = steps[std::uniform_int_distribution<std::size_t>(0, steps.size() - 1)(rng)].next;
      }
    } catch (const std::exception& e) {
      rep.failures.push_back(std::string("exception: ") + e.what() + "\n" + text);
    }
  }
  return rep;
}

}  // namespace

PropertyReport check_compatibility(int models, int walk_length, std::uint64_t seed) {
  return run_walks(models, walk_length, seed,
                   [](const Model& m, const Semantics& sem, const Configuration& c, std::size_t& n) -> std::string {
                     if (!compatible(m, c)) return "incompatible state";
                     auto probs = sem.prob_steps(c);
                     auto nd = sem.nondet_steps(c);
                     if (!probs.empty() && !nd.empty()) return "nondeterministic step beside a probabilistic one";
                     Rational total(0);
                     for (const auto& p : probs) {
                       ++n;
                       total += p.weight;
                       if (!compatible(m, p.next)) return "incompatible probabilistic successor";
                     }
                     if (!probs.empty() && total != Rational(1)) return "weights sum to " + to_string(total);
                     for (const auto& s : nd) {
                       ++n;
                       if (!compatible(m, s.next)) return "incompatible successor via " + label_to_string(m, s.label);
                     }
                     return "";
                   });
}

PropertyReport check_policy_soundness(int models, int walk_length, std::uint64_t seed) {
  return run_walks(models, walk_length, seed,
                   [](const Model& m, const Semantics& sem, const Configuration& c, std::size_t& n) -> std::string {
                     auto nd = sem.nondet_steps(c);
                     auto pr = sem.prioritized_steps(c, m.policy);
                     auto none = sem.prioritized_steps(c, Policy{});
                     std::set<ActionLabel> enabled;
                     std::multiset<StepKey> all, kept, unpruned;
                     for (const auto& s : nd) {
                       enabled.insert(s.label);
                       all.insert({s.label, canonical_key(s.next)});
                     }
                     for (const auto& s : pr) kept.insert({s.label, canonical_key(s.next)});
                     for (const auto& s : none) unpruned.insert({s.label, canonical_key(s.next)});
                     n += nd.size();
                     if (!std::includes(all.begin(), all.end(), kept.begin(), kept.end()))
                       return "prioritized step not among nondeterministic steps";
                     if (unpruned != all) return "empty policy pruned a step";
                     for (const auto& s : nd) {
                       if (kept.count({s.label, canonical_key(s.next)})) continue;
                       if (!m.policy.dominated(s.label, enabled))
                         return "pruned step " + label_to_string(m, s.label) + " is not dominated";
                     }
                     for (const auto& s : pr)
                       if (m.policy.dominated(s.label, enabled))
                         return "dominated step " + label_to_string(m, s.label) + " kept";
                     return "";
                   });
}

}  // namespace palps::testing
