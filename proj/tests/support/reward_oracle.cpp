#include "reward_oracle.hpp"

#include <algorithm>
#include <limits>

namespace palps::testing {

namespace {

struct Walker {
  const Semantics& sem;
  const Policy& policy;
  const RewardFns& r;
  bool maximise;
  bool cumulative;

  double value(const Configuration& c, int k) const {
    if (k == 0) return cumulative ? 0.0 : r.state(c);
    auto probs = sem.prob_steps(c);
    if (!probs.empty()) {
      double v = 0.0;
      for (const auto& p : probs) v += to_double(p.weight) * value(p.next, k);
      return v;
    }
    auto steps = sem.prioritized_steps(c, policy);
    if (steps.empty()) return (cumulative ? r.state(c) : 0.0) + value(c, k - 1);
    double best = maximise ? -std::numeric_limits<double>::infinity() : std::numeric_limits<double>::infinity();
    for (const auto& s : steps) {
      const bool tick = s.label.kind == ActionLabel::Kind::Tick;
      double v = value(s.next, tick ? k - 1 : k);
      if (cumulative) v += r.action(s.label) + (tick ? r.state(c) : 0.0);
      best = maximise ? std::max(best, v) : std::min(best, v);
    }
    return best;
  }
};

}  // namespace

double oracle_cumulative(const Semantics& sem, const Policy& policy, const RewardFns& r, bool maximise, int k) {
  return Walker{sem, policy, r, maximise, true}.value(sem.initial(), k);
}

double oracle_instant(const Semantics& sem, const Policy& policy, const RewardFns& r, bool maximise, int k) {
  return Walker{sem, policy, r, maximise, false}.value(sem.initial(), k);
}

}  // namespace palps::testing
