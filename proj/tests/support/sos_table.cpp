#include "sos_table.hpp"

#include <algorithm>

#include "palps/parser.hpp"
#include "palps/statespace.hpp"

namespace palps::testing {

Fixture::Fixture(const std::string& text) {
  model = std::make_unique<Model>(parse_model(text));
  sem = std::make_unique<Semantics>(*model);
  init = sem->initial();
}

std::string Fixture::env(const Configuration& c) const {
  std::string s;
  for (const auto& e : c.env.entries())
    s += (s.empty() ? "" : ",") + std::string("(") + model->location_name(e.location) + "," +
         model->species_name(e.species) + "," + std::to_string(e.count) + ")";
  return "{" + s + "}";
}

std::string Fixture::state(const Configuration& c) const {
  return describe_state(*model, canonicalize(c)) + " " + env(c);
}

namespace {

std::vector<std::string> steps(const Fixture& f, const std::vector<NondetStep>& v) {
  std::vector<std::string> out;
  for (const auto& s : v) out.push_back(label_to_string(*f.model, s.label) + " => " + f.state(s.next));
  std::sort(out.begin(), out.end());
  return out;
}

using Lines = std::vector<std::string>;

Lines env_lines(const Environment& e, const std::vector<std::string>& locs, const std::vector<std::string>& sps) {
  Lines out;
  for (const auto& x : e.entries())
    out.push_back(locs[x.location.value] + "," + sps[x.species.value] + "," + std::to_string(x.count));
  if (out.empty()) out.push_back("empty");
  return out;
}

const LocationId L1{0}, L2{1};
const SpeciesId S{0}, T{1};
const std::vector<std::string> kLocs{"l1", "l2"}, kSps{"s", "t"};

Lines bottom_or(const std::function<Environment()>& f) {
  try {
    return env_lines(f(), kLocs, kSps);
  } catch (const BottomError&) {
    return {"bottom"};
  }
}

// Common observation helpers.
Lines nondet(const Fixture* f) { return f->nondet(f->init); }
Lines prob(const Fixture* f) { return f->prob(f->init); }
Lines prior(const Fixture* f) { return f->prioritized(f->init); }

const char* kTwoLoc = "locations: l1, l2;\nneighbors: l1-l2;\n";
const char* kThreeLoc = "locations: l1, l2, l3;\nneighbors: l1-l2;\n";

std::string model(const std::string& header, const std::string& species, const std::string& system,
                  const std::string& tail = "") {
  return header + species + "\nsystem {\n" + system + "\n}" + tail + "\n";
}

std::vector<SosCase> build_table() {
  std::vector<SosCase> t;
  auto add = [&](std::string rule, std::string m, std::function<Lines(const Fixture*)> obs, Lines expected) {
    t.push_back({std::move(rule), std::move(m), std::move(obs), std::move(expected)});
  };

  // Environment operations.
  add("env add: fresh entry", "", [](const Fixture*) { return env_lines(Environment(2, 2).added(S, L1), kLocs, kSps); },
      {"l1,s,1"});
  add("env add: species are independent", "",
      [](const Fixture*) { return env_lines(Environment(2, 2).added(S, L1).added(T, L1), kLocs, kSps); },
      {"l1,s,1", "l1,t,1"});
  add("env remove: last individual drops the entry", "",
      [](const Fixture*) { return env_lines(Environment(2, 2).added(S, L1).removed(S, L1), kLocs, kSps); }, {"empty"});
  add("env remove: absent entry is bottom", "",
      [](const Fixture*) { return bottom_or([] { return Environment(2, 2).removed(S, L2); }); }, {"bottom"});
  add("env merge: opposite deltas cancel", "",
      [](const Fixture*) {
        Environment e = Environment(2, 2).added(S, L1).added(S, L1);
        return bottom_or([&] { return env_merge(e, e.removed(S, L1), e.added(S, L1)); });
      },
      {"l1,s,2"});
  add("env merge: double removal is bottom", "",
      [](const Fixture*) {
        Environment e = Environment(2, 2).added(S, L1);
        return bottom_or([&] { return env_merge(e, e.removed(S, L1), e.removed(S, L1)); });
      },
      {"bottom"});

  // Single components.
  add("Nil: inactive individual ticks", model(kTwoLoc, "species s { process P = 0; }", "1 of s.P at l1;"), nondet,
      {"tick => s[0]@l1 {}"});
  add("Tick: continuation 0 leaves the environment",
      model(kTwoLoc, "species s { process P = tick.0; }", "1 of s.P at l1;"), nondet, {"tick => s[0]@l1 {}"});
  add("Tick: live continuation keeps its count", model(kTwoLoc, "species s { process P = tick.P; }", "1 of s.P at l1;"),
      nondet, {"tick => s[tick.P]@l1 {(l1,s,1)}"});
  add("Act: visible input", model(kTwoLoc, "species s { process P = a?.tick.P; }", "1 of s.P at l1;"), nondet,
      {"in(a,l1,s) => s[tick.P]@l1 {(l1,s,1)}"});
  add("Act: visible output to 0", model(kTwoLoc, "species s { process P = a!.0; }", "1 of s.P at l1;"), nondet,
      {"out(a,l1,s) => s[0]@l1 {}"});
  add("NSum: each summand offers a step",
      model(kTwoLoc, "species s { process P = a?.tick.P + b?.0; }", "1 of s.P at l1;"), nondet,
      {"in(a,l1,s) => s[tick.P]@l1 {(l1,s,1)}", "in(b,l1,s) => s[0]@l1 {}"});
  add("Go: move to a neighbour", model(kTwoLoc, "species s { process P = go l2 . tick.P; }", "1 of s.P at l1;"), nondet,
      {"tau(go,l1,s) => s[tick.P]@l2 {(l2,s,1)}"});
  add("Go: no move to a non-neighbour",
      model(kThreeLoc, "species s { process P = go l3 . tick.P; }", "1 of s.P at l1;"), nondet, {"none"});
  add("Const: definitions unfold",
      model(kTwoLoc, "species s { process P = Q; process Q = tick.P; }", "1 of s.P at l1;"), nondet,
      {"tick => s[tick.P]@l1 {(l1,s,1)}"});
  add("Cond: first true guard wins",
      model(kTwoLoc, "species s { process P = cond(s@myloc >= 1 -> a?.0; true -> b?.0); }", "1 of s.P at l1;"), nondet,
      {"in(a,l1,s) => s[0]@l1 {}"});
  add("Cond: no true guard blocks",
      model(kTwoLoc, "species s { process P = cond(s@myloc = 2 -> a?.0); }", "1 of s.P at l1;"), nondet, {"none"});
  add("Cond: attribute guard",
      model(std::string(kTwoLoc) + "attribute h { l1: 3, l2: 5 }\n",
            "species s { process P = cond(h@myloc >= 4 -> a?.0; true -> b?.0); }", "1 of s.P at l2;"),
      nondet, {"in(a,l2,s) => s[0]@l2 {}"});

  // Probabilistic steps.
  add("PSum: branches with their weights",
      model(kTwoLoc, "species s { process P = 1/2: a?.0 (+) 1/2: b?.0; }", "1 of s.P at l1;"), prob,
      {"1/2 => s[a?.0]@l1 {(l1,s,1)}", "1/2 => s[b?.0]@l1 {(l1,s,1)}"});
  add("PSum: branch 0 leaves the environment",
      model(kTwoLoc, "species s { process P = 2/5: 0 (+) 3/5: tick.P; }", "1 of s.P at l1;"), prob,
      {"2/5 => s[0]@l1 {}", "3/5 => s[tick.P]@l1 {(l1,s,1)}"});
  add("Par3: independent choices multiply",
      model(kTwoLoc, "species s { process P = 1/2: a?.0 (+) 1/2: b?.0; }", "1 of s.P at l1;\n1 of s.P at l2;"), prob,
      {"1/4 => s[a?.0]@l1 | s[a?.0]@l2 {(l1,s,1),(l2,s,1)}", "1/4 => s[a?.0]@l1 | s[b?.0]@l2 {(l1,s,1),(l2,s,1)}",
       "1/4 => s[b?.0]@l1 | s[a?.0]@l2 {(l1,s,1),(l2,s,1)}", "1/4 => s[b?.0]@l1 | s[b?.0]@l2 {(l1,s,1),(l2,s,1)}"});
  add("Par4: a probabilistic step pre-empts nondeterminism",
      model(kTwoLoc, "species s { process P = 1/2: tick.P (+) 1/2: 0; process Q = a?.0; }",
            "1 of s.P at l1;\n1 of s.Q at l2;"),
      nondet, {"none"});
  add("Go uniform: one branch per neighbour",
      model("locations: l1, l2, l3;\nneighbors: l1-l2, l1-l3;\n",
            "species s { process P = disperse uniform nb(myloc) then tick.P; }", "1 of s.P at l1;"),
      prob, {"1/2 => s[go l2 . tick.P]@l1 {(l1,s,1)}", "1/2 => s[go l3 . tick.P]@l1 {(l1,s,1)}"});

  // Parallel composition and restriction.
  add("Par2: co-located complementary actions synchronise",
      model(kTwoLoc, "species s { process P = a!.0; process Q = a?.tick.Q; }", "1 of s.P at l1;\n1 of s.Q at l1;",
            " restrict { a }"),
      nondet, {"tau(a,l1,s) => s[0]@l1 | s[tick.Q]@l1 {(l1,s,1)}"});
  add("Par2: no synchronisation across locations",
      model(kTwoLoc, "species s { process P = a!.0; process Q = a?.tick.Q; }", "1 of s.P at l1;\n1 of s.Q at l2;",
            " restrict { a }"),
      nondet, {"none"});
  add("Par1: unrestricted partners also act alone",
      model(kTwoLoc, "species s { process P = a!.0; process Q = a?.tick.Q; }", "1 of s.P at l1;\n1 of s.Q at l1;"),
      nondet,
      {"in(a,l1,s) => s[a!.0]@l1 | s[tick.Q]@l1 {(l1,s,2)}", "out(a,l1,s) => s[0]@l1 | s[a?.tick.Q]@l1 {(l1,s,1)}",
       "tau(a,l1,s) => s[0]@l1 | s[tick.Q]@l1 {(l1,s,1)}"});
  add("Par2: the label carries the outputter's species",
      model(kTwoLoc, "species s { process P = a!.tick.P; }\nspecies t { process Q = a?.tick.Q; }",
            "1 of s.P at l1;\n1 of t.Q at l1;", " restrict { a }"),
      nondet, {"tau(a,l1,s) => s[tick.P]@l1 | t[tick.Q]@l1 {(l1,s,1),(l1,t,1)}"});
  add("Time: every component must offer tick",
      model(kTwoLoc, "species s { process P = tick.P; process Q = a?.tick.Q; }", "1 of s.P at l1;\n1 of s.Q at l1;"),
      nondet, {"in(a,l1,s) => s[tick.P]@l1 | s[tick.Q]@l1 {(l1,s,2)}"});
  add("Time: removals of several components merge",
      model(kTwoLoc, "species s { process P = tick.0; process Q = tick.Q; }", "1 of s.P at l1;\n1 of s.Q at l1;"),
      nondet, {"tick => s[0]@l1 | s[tick.Q]@l1 {(l1,s,1)}"});

  // Replication.
  add("Rep: a new individual appears at the outputter's location",
      model(kTwoLoc, "species s { process P = rep!.tick.P; process B = tick.P; bound 1; init B; }",
            "1 of s.P at l2;\nreplicator s;", " restrict { rep }"),
      nondet, {"tau(rep,l2,s) => s[tick.P]@l2 | s[tick.P]@l2 | !rep=0 {(l2,s,2)}"});
  add("Rep: exhausted bound blocks the output",
      model(kTwoLoc, "species s { process P = rep!.tick.P; process B = tick.P; bound 0; init B; }",
            "1 of s.P at l1;\nreplicator s;", " restrict { rep }"),
      nondet, {"none"});

  // Policies.
  add("Policy: a dominated step is pruned",
      model(kTwoLoc,
            "species s { process P = rep!.tick.P; process G = go l2 . tick.G; process B = tick.P; bound 1; init B; }",
            "1 of s.P at l1;\n1 of s.G at l1;\nreplicator s;",
            " restrict { rep }\npolicy {\n  tau(rep, $a, s) < tau(go, $b, s);\n}"),
      prior, {"tau(go,l1,s) => s[rep!.tick.P]@l1 | s[tick.G]@l2 | !rep=1 {(l1,s,1),(l2,s,1)}"});
  add("Policy: the dominated step survives alone",
      model(kTwoLoc, "species s { process P = rep!.tick.P; process B = tick.P; bound 1; init B; }",
            "1 of s.P at l1;\nreplicator s;", " restrict { rep }\npolicy {\n  tau(rep, $a, s) < tau(go, $b, s);\n}"),
      prior, {"tau(rep,l1,s) => s[tick.P]@l1 | s[tick.P]@l1 | !rep=0 {(l1,s,2)}"});
  add("Policy: empty policy keeps every step",
      model(kTwoLoc, "species s { process P = a?.0 + b?.0; }", "1 of s.P at l1;"), prior,
      {"in(a,l1,s) => s[0]@l1 {}", "in(b,l1,s) => s[0]@l1 {}"});
  return t;
}

}  // namespace

std::vector<std::string> Fixture::nondet(const Configuration& c) const { return steps(*this, sem->nondet_steps(c)); }

std::vector<std::string> Fixture::prioritized(const Configuration& c) const {
  return steps(*this, sem->prioritized_steps(c, model->policy));
}

std::vector<std::string> Fixture::prob(const Configuration& c) const {
  std::vector<std::string> out;
  for (const auto& s : sem->prob_steps(c)) out.push_back(to_string(s.weight) + " => " + state(s.next));
  std::sort(out.begin(), out.end());
  return out;
}

const std::vector<SosCase>& sos_table() {
  static const std::vector<SosCase> table = build_table();
  return table;
}

SosOutcome run_case(const SosCase& c) {
  SosOutcome o;
  try {
    std::unique_ptr<Fixture> f;
    if (!c.model.empty()) f = std::make_unique<Fixture>(c.model);
    o.observed = c.observe(f.get());
    if (o.observed.empty()) o.observed.push_back("none");
    o.pass = o.observed == c.expected;
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  return o;
}

}  // namespace palps::testing
