#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "palps/analysis.hpp"

using namespace palps;
using namespace palps::testing;

namespace {

std::string batch_csv(const Semantics& sem, const SimOptions& opt, int runs, int threads) {
  auto b = simulate_batch(sem, opt, runs, threads);
  std::ostringstream os;
  write_batch_csv(os, b);
  write_mean_csv(os, b);
  return os.str();
}

Model with_bound(int bound) {
  auto text = slurp(model_path("mite_generations"));
  auto at = text.find("bound 47");
  REQUIRE(at != std::string::npos);
  text.replace(at, 8, "bound " + std::to_string(bound));
  return parse_model(text);
}

}  // namespace

TEST_SUITE("simulate") {
  TEST_CASE("same seed gives the same output") {
    Model m = load_model("example4");
    Semantics sem(m);
    SimOptions opt;
    opt.ticks = 15;
    opt.seed = 42;
    CHECK(batch_csv(sem, opt, 20, 1) == batch_csv(sem, opt, 20, 1));
    opt.seed = 43;
    const auto other = batch_csv(sem, opt, 20, 1);
    opt.seed = 42;
    CHECK(other != batch_csv(sem, opt, 20, 1));
  }

  TEST_CASE("results do not depend on the thread count") {
    Model m = load_model("example1");
    Semantics sem(m);
    SimOptions opt;
    opt.ticks = 10;
    opt.seed = 5;
    CHECK(batch_csv(sem, opt, 30, 1) == batch_csv(sem, opt, 30, 4));
    opt.scheduler = Scheduler::Ordered;
    CHECK(batch_csv(sem, opt, 30, 1) == batch_csv(sem, opt, 30, 3));
  }

  TEST_CASE("a trace has one row per tick plus the initial state") {
    Model m = load_model("rewards_pair");
    Semantics sem(m);
    SimOptions opt;
    opt.ticks = 12;
    auto t = simulate(sem, opt);
    REQUIRE(t.deadlock_tick < 0);
    CHECK(t.env.size() == 13);
    CHECK(t.env[0].total() == 2);
    std::ostringstream os;
    write_trace_csv(os, m, t);
    const auto csv = os.str();
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 14);
    CHECK(csv.rfind("tick,l1:s,l2:s\n", 0) == 0);
  }

  TEST_CASE("batch mean has one entry per tick") {
    Model m = load_model("extinction");
    Semantics sem(m);
    SimOptions opt;
    opt.ticks = 6;
    auto b = simulate_batch(sem, opt, 200, 2);
    REQUIRE(b.mean_population.size() == 7);
    CHECK(b.mean_population[0] == doctest::Approx(1.0));
    CHECK(b.mean_population[3] == doctest::Approx(0.216).epsilon(0.4));
    CHECK(b.runs.size() == 200);
    for (std::size_t i = 0; i < b.runs.size(); ++i) CHECK(b.runs[i].seed == opt.seed + i);
  }

  TEST_CASE("an exhausted replicator deadlocks the system") {
    Model m = with_bound(2);
    Semantics sem(m);
    SimOptions opt;
    opt.ticks = 20;
    auto b = simulate_batch(sem, opt, 20, 1);
    int deadlocked = 0;
    for (const auto& r : b.runs) deadlocked += r.deadlock_tick >= 0;
    CHECK(deadlocked > 0);
  }

  TEST_CASE("an unbounded replicator never deadlocks early") {
    Model m = with_bound(2);
    Semantics sem(m, SemanticsOptions{true});
    SimOptions opt;
    opt.ticks = 4;
    auto b = simulate_batch(sem, opt, 20, 1);
    for (const auto& r : b.runs) CHECK(r.deadlock_tick < 0);
  }
}
