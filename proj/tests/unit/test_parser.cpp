#include "doctest.h"
#include "helpers.hpp"

using namespace palps;
using palps::testing::load_model;
using palps::testing::model_path;
using palps::testing::slurp;

namespace {

const char* const kModels[] = {"example1", "example1_small",   "example2",  "example3",     "example4", "extinction",
                               "mite",     "mite_generations", "reduction", "rewards_pair", "tick_loop"};

SyntaxError syntax_error(const std::string& text) {
  try {
    parse_model(text);
  } catch (const SyntaxError& e) {
    return e;
  }
  FAIL("expected a syntax error");
  return SyntaxError({});
}

}  // namespace

TEST_SUITE("parser") {
  TEST_CASE("bundled models parse, validate and round-trip") {
    for (const std::string name : kModels) {
      CAPTURE(name);
      Model m = load_model(name);
      auto rep = validate_model(m);
      CHECK(rep.ok());
      Model again = parse_model(format_model(m));
      CHECK(structurally_equal(m, again));
      CHECK(format_model(again) == format_model(m));
    }
  }

  TEST_CASE("habitat and species structure") {
    Model m = load_model("example4");
    CHECK(m.habitat.size() == 4);
    CHECK(m.habitat.adjacent(LocationId{0}, LocationId{1}));
    CHECK_FALSE(m.habitat.adjacent(LocationId{0}, LocationId{3}));
    CHECK(m.habitat.neighbors(LocationId{0}).size() == 2);
    REQUIRE(m.species.size() == 1);
    CHECK(m.species[0].name == "s");
    CHECK(m.species[0].replicators.size() == 1);
  }

  TEST_CASE("policy wildcards instantiate per location") {
    Model m = load_model("example4");
    // Two patterns, each with independent location variables over 4 locations.
    CHECK(m.policy.pairs().size() == 32);
    auto ch = m.find_channel("rep");
    REQUIRE(ch.valid());
    auto rep = ActionLabel::tau(ch, LocationId{0}, SpeciesId{0});
    auto go = ActionLabel::tau_go(LocationId{3}, SpeciesId{0});
    CHECK(m.policy.contains(rep, go));
    CHECK(m.policy.dominated(rep, {go}));
    CHECK_FALSE(m.policy.dominated(go, {rep}));
  }

  TEST_CASE("probability sums are checked with a source position") {
    auto e = syntax_error(slurp(std::string(PALPS_MODELS) + "/../tests/data/bad_probability.palps"));
    REQUIRE(e.diagnostics.size() == 1);
    CHECK(e.diagnostics[0].span.line == 3);
    CHECK(e.diagnostics[0].message.find("5/6") != std::string::npos);
  }

  TEST_CASE("syntax errors carry line and column") {
    auto e = syntax_error("locations: l1;\nspecies s {\n  process P = tick.Q;\n}\nsystem { 1 of s.P at l1; }\n");
    REQUIRE_FALSE(e.diagnostics.empty());
    CHECK(e.diagnostics[0].span.line == 3);
    CHECK(e.diagnostics[0].message.find("undefined process") != std::string::npos);

    auto u = syntax_error("locations: l1;\nspecies s { process P = tick.P; }\nsystem { 1 of s.P at l9; }\n");
    CHECK(u.diagnostics[0].span.line == 3);

    syntax_error("locations: l1;\nspecies s { process P = tick.P; }\n");  // no system block
    syntax_error("locations: l1;\nspecies s { process P = tick.P }\nsystem { 1 of s.P at l1; }\n");
  }

  TEST_CASE("cyclic policies are rejected") {
    auto e = syntax_error(
        "locations: l1;\nchannels: a, b;\nspecies s { process P = a?.P + b?.P; }\nsystem { 1 of s.P at l1; }\n"
        "policy { in(a,*,s) < in(b,*,s); in(b,*,s) < in(a,*,s); }\n");
    CHECK(e.diagnostics[0].message.find("partial order") != std::string::npos);
  }

  TEST_CASE("policies are transitively closed") {
    Model m = parse_model(
        "locations: l1;\nchannels: a, b, c;\nspecies s { process P = a?.P + b?.P + c?.P; }\n"
        "system { 1 of s.P at l1; }\npolicy { in(a,*,s) < in(b,*,s); in(b,*,s) < in(c,*,s); }\n");
    auto lab = [&](const char* ch) { return ActionLabel::in(m.find_channel(ch), LocationId{0}, SpeciesId{0}); };
    CHECK(m.policy.contains(lab("a"), lab("c")));
    CHECK(m.policy.pairs().size() == 3);
  }

  TEST_CASE("predicates and expressions") {
    Model m = load_model("example2");
    auto p = parse_predicate(m, "pop = 0");
    CHECK(format_bool(m, p).find("0") != std::string::npos);
    CHECK_NOTHROW(parse_predicate(m, "s@a >= 1"));
    CHECK_NOTHROW(parse_arith(m, "idx@b * 2"));
    CHECK_THROWS_AS(parse_predicate(m, "nosuch@a >= 1"), SyntaxError);
    CHECK_THROWS_AS(parse_predicate(m, "pop = 0 garbage"), SyntaxError);
  }

  TEST_CASE("validation warns on unreachable guards without failing") {
    Model m = load_model("example2");
    auto rep = validate_model(m);
    CHECK(rep.ok());
  }

  TEST_CASE("model files exist for every bundled name") {
    for (const std::string name : kModels) CHECK_NOTHROW(slurp(model_path(name)));
  }
}
