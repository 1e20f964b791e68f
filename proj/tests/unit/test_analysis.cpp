#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "palps/analysis.hpp"
#include "reward_oracle.hpp"

using namespace palps;
using namespace palps::testing;

namespace {

struct Loaded {
  Model m;
  std::unique_ptr<Semantics> sem;
  Mdp mdp;

  explicit Loaded(const std::string& name) : m(load_model(name)) {
    sem = std::make_unique<Semantics>(m);
    mdp = build_mdp(*sem, {});
  }
  double query(const std::string& q) const { return check_query(mdp, m, parse_query(m, q)).value; }
};

RewardFns food_rewards(const Model& m) {
  const SpeciesId s = m.find_species("s");
  const LocationId l2 = m.habitat.find("l2");
  const ChannelId eat = m.find_channel("eat");
  return RewardFns{[=](const Configuration& c) { return c.env.total() + (c.env.count(l2, s) >= 1 ? 3.0 : 0.0); },
                   [=](const ActionLabel& a) {
                     if (a.kind == ActionLabel::Kind::Tick) return 0.5;
                     if (a.kind == ActionLabel::Kind::In && a.channel == eat) return 2.0;
                     return 0.0;
                   }};
}

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("extinction probability within k ticks") {
    Loaded x("extinction");
    for (int k : {0, 1, 3, 10}) {
      CAPTURE(k);
      const double expected = 1.0 - std::pow(0.6, k);
      CHECK(x.query("Pmax=? [F<=" + std::to_string(k) + " pop=0]") == doctest::Approx(expected).epsilon(1e-9));
      CHECK(x.query("Pmin=? [F<=" + std::to_string(k) + " pop=0]") == doctest::Approx(expected).epsilon(1e-9));
      CHECK(x.query("P=? [F<=" + std::to_string(k) + " pop=0]") == doctest::Approx(expected).epsilon(1e-9));
    }
    CHECK(x.query("Pmax=? [F pop=0]") == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(x.query("R{\"alive\"}max=? [I=2]") == doctest::Approx(0.36).epsilon(1e-9));
  }

  TEST_CASE("trivial reachability") {
    Loaded x("tick_loop");
    CHECK(x.query("Pmax=? [F pop=1]") == doctest::Approx(1.0));
    CHECK(x.query("Pmax=? [F pop=2]") == doctest::Approx(0.0));
    CHECK(x.query("Pmax=? [F<=0 pop=1]") == doctest::Approx(1.0));
    CHECK(x.query("Pmax=? [pop=1 U<=5 pop=0]") == doctest::Approx(0.0));
  }

  TEST_CASE("rewards agree with path enumeration") {
    Loaded x("rewards_pair");
    auto fns = food_rewards(x.m);
    for (int k = 0; k <= 4; ++k) {
      CAPTURE(k);
      for (bool mx : {true, false}) {
        CAPTURE(mx);
        const std::string op = mx ? "max" : "min";
        const auto ks = std::to_string(k);
        CHECK(x.query("R{\"food\"}" + op + "=? [C<=" + ks + "]") ==
              doctest::Approx(oracle_cumulative(*x.sem, x.m.policy, fns, mx, k)).epsilon(1e-9));
        CHECK(x.query("R{\"food\"}" + op + "=? [I=" + ks + "]") ==
              doctest::Approx(oracle_instant(*x.sem, x.m.policy, fns, mx, k)).epsilon(1e-9));
      }
    }
  }

  TEST_CASE("known reward values") {
    Loaded x("rewards_pair");
    CHECK(x.query("R{\"food\"}max=? [C<=3]") == doctest::Approx(18.166432).epsilon(1e-6));
    CHECK(x.query("R{\"food\"}min=? [C<=3]") == doctest::Approx(11.26).epsilon(1e-6));
    CHECK(x.query("R{\"food\"}max=? [I=2]") == doctest::Approx(3.848).epsilon(1e-6));
    CHECK(x.query("R{\"food\"}min=? [I=2]") == doctest::Approx(3.2).epsilon(1e-6));
  }

  TEST_CASE("a unique value is refused when schedulers disagree") {
    Loaded x("rewards_pair");
    CHECK_THROWS_AS(x.query("R{\"food\"}=? [C<=3]"), QueryError);
  }

  TEST_CASE("malformed queries") {
    Model m = load_model("extinction");
    CHECK_THROWS_AS(parse_query(m, "Pmax=? [G pop=0]"), QueryError);
    CHECK_THROWS_AS(parse_query(m, "Pmax=? F pop=0"), QueryError);
    CHECK_THROWS_AS(parse_query(m, "R{\"nosuch\"}max=? [C<=2]"), QueryError);
    CHECK_THROWS_AS(parse_query(m, "R{\"alive\"}max=? [S]"), QueryError);
    CHECK_THROWS_AS(parse_query(m, "Pmax=? [F nosuch@l1 > 0]"), QueryError);
    Model plain = load_model("tick_loop");
    CHECK_THROWS_AS(parse_query(plain, "Rmax=? [C<=1]"), QueryError);
  }

  TEST_CASE("query bounds parse") {
    Model m = load_model("extinction");
    auto q = parse_query(m, "Pmin=? [pop>0 U<=7 pop=0]");
    CHECK(q.kind == Query::Kind::Until);
    CHECK(q.opt == Opt::Min);
    REQUIRE(q.bound.has_value());
    CHECK(*q.bound == 7);
    auto r = parse_query(m, "R=? [I=3]");
    CHECK(r.kind == Query::Kind::Instant);
    CHECK(r.reward == "alive");
  }
}
