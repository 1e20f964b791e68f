#include "palps/analysis.hpp"
#include "palps/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <regex>

namespace palps {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

BoolExpr predicate(const Model& m, const std::string& text) {
  try {
    return parse_predicate(m, trim(text));
  } catch (const Error& e) {
    throw QueryError("bad state formula '" + trim(text) + "': " + e.what());
  }
}

// Finds a top-level `U` (outside parentheses) followed by an optional bound.
std::size_t find_until(const std::string& body) {
  int depth = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    char c = body[i];
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (depth != 0 || c != 'U') continue;
    bool left_ok = i == 0 || !(std::isalnum(static_cast<unsigned char>(body[i - 1])) || body[i - 1] == '_');
    bool right_ok = i + 1 == body.size() || !(std::isalnum(static_cast<unsigned char>(body[i + 1])) || body[i + 1] == '_');
    if (left_ok && right_ok) return i;
  }
  return std::string::npos;
}

}  // namespace

Query parse_query(const Model& m, const std::string& text) {
  static const std::regex head(R"re(^\s*(P|R(?:\{\s*"([^"]*)"\s*\})?)\s*(max|min)?\s*=\s*\?\s*\[(.*)\]\s*$)re");
  std::smatch mt;
  if (!std::regex_match(text, mt, head)) throw QueryError("cannot parse query '" + text + "'");
  Query q;
  const bool reward = mt[1].str()[0] == 'R';
  q.opt = mt[3].str() == "max" ? Opt::Max : mt[3].str() == "min" ? Opt::Min : Opt::Unique;
  std::string body = trim(mt[4].str());
  static const std::regex bound_re(R"re(^(<=\s*(\d+))?\s*)re");

  if (reward) {
    if (m.rewards.empty()) throw QueryError("model declares no rewards");
    q.reward = mt[2].matched ? mt[2].str() : m.rewards.front().name;
    if (!m.find_reward(q.reward)) throw QueryError("unknown reward structure '" + q.reward + "'");
    static const std::regex cum(R"re(^C\s*<=\s*(\d+)$)re");
    static const std::regex inst(R"re(^I\s*=\s*(\d+)$)re");
    static const std::regex reach(R"re(^F\s+(.*)$)re");
    std::smatch b;
    if (std::regex_match(body, b, cum)) {
      q.kind = Query::Kind::Cumulative;
      q.bound = std::stoi(b[1]);
    } else if (std::regex_match(body, b, inst)) {
      q.kind = Query::Kind::Instant;
      q.bound = std::stoi(b[1]);
    } else if (std::regex_match(body, b, reach)) {
      q.kind = Query::Kind::ReachReward;
      q.right = predicate(m, b[1]);
    } else {
      throw QueryError("unsupported reward formula '" + body + "'");
    }
    return q;
  }

  q.kind = Query::Kind::Until;
  std::string rest;
  if (!body.empty() && body[0] == 'F' && (body.size() == 1 || !std::isalnum(static_cast<unsigned char>(body[1])))) {
    rest = body.substr(1);
  } else {
    auto u = find_until(body);
    if (u == std::string::npos) throw QueryError("expected F or U in '" + body + "'");
    q.left = predicate(m, body.substr(0, u));
    rest = body.substr(u + 1);
  }
  std::smatch b;
  std::regex_search(rest, b, bound_re);
  if (b[2].matched) q.bound = std::stoi(b[2]);
  q.right = predicate(m, rest.substr(b[0].length()));
  return q;
}

std::vector<char> satisfying(const Mdp& mdp, const Model& m, const BoolExpr& e) {
  std::vector<char> out(mdp.size());
  for (std::size_t s = 0; s < mdp.size(); ++s)
    out[s] = eval_bool(mdp.states[s].env, m.attributes, e, std::nullopt) ? 1 : 0;
  return out;
}

double state_reward(const Model& m, const RewardDef& r, const Configuration& c) {
  double v = 0.0;
  for (const auto& [pred, w] : r.states)
    if (eval_bool(c.env, m.attributes, pred, std::nullopt)) {
      auto x = eval_arith(c.env, m.attributes, w, std::nullopt);
      v += x.exact ? to_double(x.q) : x.d;
    }
  return v;
}

double action_reward(const RewardDef& r, const ActionLabel& a) {
  double v = 0.0;
  for (const auto& [pat, w] : r.actions)
    if (pat.matches(a)) v += to_double(w);
  return v;
}

namespace {

double pick(Opt opt, double a, double b) { return opt == Opt::Min ? std::min(a, b) : std::max(a, b); }

double expect(const Choice& c, const std::vector<double>& v) {
  double x = 0.0;
  for (const auto& [t, p] : c.dist) x += to_double(p) * v[t];
  return x;
}

// One tick level: solves x(s) = opt over choices, where tick choices read
// `prev` and the others read `x`. `fixed[s]` pins a state to `pinned[s]`.
template <class TickValue, class StepValue>
std::size_t solve_level(const Mdp& mdp, Opt opt, std::vector<double>& x, const std::vector<char>& fixed,
                        const std::vector<double>& pinned, TickValue tick_value, StepValue step_value,
                        const SolverOptions& so) {
  const int n = static_cast<int>(mdp.size());
  for (std::size_t it = 1; it <= so.max_iterations; ++it) {
    double delta = 0.0;
    for (int s = n - 1; s >= 0; --s) {
      double v;
      if (fixed[s]) {
        v = pinned[s];
      } else if (mdp.choices[s].empty()) {
        v = tick_value(s, nullptr);
      } else {
        bool first = true;
        v = 0.0;
        for (const auto& c : mdp.choices[s]) {
          double y = c.is_tick ? tick_value(s, &c) : step_value(s, c);
          v = first ? y : pick(opt, v, y);
          first = false;
        }
      }
      delta = std::max(delta, std::fabs(v - x[s]));
      x[s] = v;
    }
    if (delta < so.epsilon) return it;
  }
  throw Error("value iteration did not converge");
}

}  // namespace

std::vector<double> reach_probability(const Mdp& mdp, const std::vector<char>& left, const std::vector<char>& right,
                                      Opt opt, std::optional<int> ticks, const SolverOptions& so) {
  const std::size_t n = mdp.size();
  std::vector<char> fixed(n);
  std::vector<double> pinned(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    fixed[s] = right[s] || !left[s];
    pinned[s] = right[s] ? 1.0 : 0.0;
  }
  std::vector<double> x(pinned);
  if (!ticks) {
    auto tick = [&](int s, const Choice* c) { return c ? expect(*c, x) : x[s]; };
    auto step = [&](int, const Choice& c) { return expect(c, x); };
    solve_level(mdp, opt, x, fixed, pinned, tick, step, so);
    return x;
  }
  std::vector<double> prev(n, 0.0);
  for (int j = 0; j <= *ticks; ++j) {
    auto tick = [&](int s, const Choice* c) {
      if (j == 0) return 0.0;
      return c ? expect(*c, prev) : prev[s];
    };
    auto step = [&](int, const Choice& c) { return expect(c, x); };
    x = pinned;
    solve_level(mdp, opt, x, fixed, pinned, tick, step, so);
    prev = x;
  }
  return x;
}

std::vector<double> cumulative_reward(const Mdp& mdp, const Model& m, const RewardDef& r, Opt opt, int ticks) {
  const std::size_t n = mdp.size();
  std::vector<double> rs(n);
  for (std::size_t s = 0; s < n; ++s) rs[s] = state_reward(m, r, mdp.states[s]);
  const double tick_action = action_reward(r, ActionLabel::tick());
  std::vector<char> fixed(n, 0);
  std::vector<double> pinned(n, 0.0), prev(n, 0.0), x(n, 0.0);
  for (int j = 1; j <= ticks; ++j) {
    auto tick = [&](int s, const Choice* c) {
      return rs[s] + (c ? tick_action + expect(*c, prev) : prev[s]);
    };
    auto step = [&](int, const Choice& c) {
      return (c.is_prob ? 0.0 : action_reward(r, c.label)) + expect(c, x);
    };
    std::fill(x.begin(), x.end(), 0.0);
    solve_level(mdp, opt, x, fixed, pinned, tick, step, SolverOptions{});
    prev = x;
  }
  return prev;
}

std::vector<double> instant_reward(const Mdp& mdp, const Model& m, const RewardDef& r, Opt opt, int ticks) {
  const std::size_t n = mdp.size();
  std::vector<double> prev(n);
  for (std::size_t s = 0; s < n; ++s) prev[s] = state_reward(m, r, mdp.states[s]);
  std::vector<char> fixed(n, 0);
  std::vector<double> pinned(n, 0.0), x(n, 0.0);
  for (int j = 1; j <= ticks; ++j) {
    auto tick = [&](int s, const Choice* c) { return c ? expect(*c, prev) : prev[s]; };
    auto step = [&](int, const Choice& c) { return expect(c, x); };
    std::fill(x.begin(), x.end(), 0.0);
    solve_level(mdp, opt, x, fixed, pinned, tick, step, SolverOptions{});
    prev = x;
  }
  return prev;
}

namespace {

std::vector<double> reach_reward(const Mdp& mdp, const Model& m, const RewardDef& r, const std::vector<char>& target,
                                 Opt opt, const SolverOptions& so) {
  const std::size_t n = mdp.size();
  std::vector<char> all(n, 1);
  // States that may miss the target get an infinite value.
  auto p = reach_probability(mdp, all, target, opt == Opt::Max ? Opt::Min : Opt::Max, std::nullopt, so);
  std::vector<double> rs(n);
  for (std::size_t s = 0; s < n; ++s) rs[s] = state_reward(m, r, mdp.states[s]);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<char> fixed(n, 0);
  std::vector<double> pinned(n, 0.0), x(n, 0.0);
  for (std::size_t s = 0; s < n; ++s) {
    if (target[s]) {
      fixed[s] = 1;
    } else if (p[s] < 1.0 - 1e-9) {
      fixed[s] = 1;
      pinned[s] = inf;
    }
  }
  x = pinned;
  auto value = [&](int, const Choice& c, double base) {
    double y = base;
    for (const auto& [t, q] : c.dist) {
      if (std::isinf(x[t])) return inf;
      y += to_double(q) * x[t];
    }
    return y;
  };
  auto tick = [&](int s, const Choice* c) {
    return c ? value(s, *c, rs[s] + action_reward(r, ActionLabel::tick())) : inf;
  };
  auto step = [&](int s, const Choice& c) { return value(s, c, c.is_prob ? 0.0 : action_reward(r, c.label)); };
  solve_level(mdp, opt, x, fixed, pinned, tick, step, so);
  return x;
}

}  // namespace

QueryResult check_query(const Mdp& mdp, const Model& m, const Query& q, const SolverOptions& so) {
  auto run = [&](Opt opt) -> double {
    switch (q.kind) {
      case Query::Kind::Until:
        return reach_probability(mdp, satisfying(mdp, m, q.left), satisfying(mdp, m, q.right), opt, q.bound,
                                 so)[mdp.initial];
      case Query::Kind::Cumulative:
        return cumulative_reward(mdp, m, *m.find_reward(q.reward), opt, *q.bound)[mdp.initial];
      case Query::Kind::Instant:
        return instant_reward(mdp, m, *m.find_reward(q.reward), opt, *q.bound)[mdp.initial];
      case Query::Kind::ReachReward:
        return reach_reward(mdp, m, *m.find_reward(q.reward), satisfying(mdp, m, q.right), opt, so)[mdp.initial];
    }
    return 0.0;
  };
  QueryResult res;
  res.partial = !mdp.complete();
  if (q.opt != Opt::Unique) {
    res.value = run(q.opt);
    return res;
  }
  double hi = run(Opt::Max), lo = run(Opt::Min);
  bool same = (std::isinf(hi) && std::isinf(lo)) || std::fabs(hi - lo) <= 1e-9;
  if (!same) throw QueryError("value depends on the scheduler; use min or max");
  res.value = hi;
  return res;
}

}  // namespace palps
