#include "palps/gc_interp.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <optional>
#include <set>

namespace palps::gc {

namespace {

class Evaluator {
 public:
  Evaluator(const GcModel& g, const State& s) : g_(g), s_(s), cache_(g.formulas.size()) {}

  Value eval(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind) {
      case K::Num:
        return num(e.num);
      case K::Bool:
        return boolean(e.flag);
      case K::Var:
        return num(Rational(s_.at(e.index)));
      case K::Const:
        return g_.constants.at(e.index).second;
      case K::Formula: {
        auto& c = cache_[e.index];
        if (!c) {
          const auto& f = g_.formulas.at(e.index).second;
          if (!f) throw GcError("formula " + g_.formulas[e.index].first + " is undefined");
          c = eval(*f);
        }
        return *c;
      }
      case K::Not:
        return boolean(!as_bool(eval(*e.args[0])));
      case K::Neg:
        return num(-as_num(eval(*e.args[0])));
      case K::Ite:
        return as_bool(eval(*e.args[0])) ? eval(*e.args[1]) : eval(*e.args[2]);
      case K::Call: {
        Rational v = as_num(eval(*e.args[0]));
        for (std::size_t i = 1; i < e.args.size(); ++i) {
          Rational w = as_num(eval(*e.args[i]));
          v = e.op == "min" ? std::min(v, w) : std::max(v, w);
        }
        return num(v);
      }
      case K::Bin:
        return binary(e);
    }
    return Value{};
  }

  bool truth(const Expr& e) { return as_bool(eval(e)); }

 private:
  const GcModel& g_;
  const State& s_;
  std::vector<std::optional<Value>> cache_;

  static Value num(Rational q) { return Value{false, false, q}; }
  static Value boolean(bool b) { return Value{true, b, Rational(0)}; }
  static bool as_bool(const Value& v) {
    if (!v.is_bool) throw GcError("expected a boolean");
    return v.b;
  }
  static Rational as_num(const Value& v) {
    if (v.is_bool) throw GcError("expected a number");
    return v.q;
  }

  Value binary(const Expr& e) {
    const std::string& op = e.op;
    if (op == "&") return boolean(truth(*e.args[0]) && truth(*e.args[1]));
    if (op == "|") return boolean(truth(*e.args[0]) || truth(*e.args[1]));
    Value a = eval(*e.args[0]), b = eval(*e.args[1]);
    if (op == "=" || op == "!=") {
      bool eq = a.is_bool == b.is_bool && (a.is_bool ? a.b == b.b : a.q == b.q);
      if (a.is_bool != b.is_bool) throw GcError("comparison of a boolean with a number");
      return boolean(op == "=" ? eq : !eq);
    }
    Rational x = as_num(a), y = as_num(b);
    if (op == "<") return boolean(x < y);
    if (op == "<=") return boolean(x <= y);
    if (op == ">") return boolean(x > y);
    if (op == ">=") return boolean(x >= y);
    if (op == "+") return num(x + y);
    if (op == "-") return num(x - y);
    if (op == "*") return num(x * y);
    if (op == "/") {
      if (y == Rational(0)) throw GcError("division by zero");
      return num(x / y);
    }
    throw GcError("unknown operator " + op);
  }
};

using Outcome = std::vector<std::pair<State, Rational>>;

// Applies one branch per participating command, all reading `s`.
void combine(const GcModel& g, const State& s, Evaluator& ev, const std::vector<const Command*>& cmds, std::size_t k,
             State& cur, std::vector<int>& written, Rational p, Outcome& out) {
  if (k == cmds.size()) {
    for (std::size_t v = 0; v < cur.size(); ++v)
      if (cur[v] < g.vars[v].lo || cur[v] > g.vars[v].hi)
        throw RangeViolation("variable " + g.vars[v].name + " leaves its range with value " + std::to_string(cur[v]));
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& o) { return o.first == cur; });
    if (it != out.end())
      it->second += p;
    else
      out.push_back({cur, p});
    return;
  }
  const Command& c = *cmds[k];
  Rational total(0);
  for (const auto& b : c.branches) {
    Value pv = ev.eval(*b.prob);
    if (pv.is_bool || pv.q <= Rational(0)) throw GcError("line " + std::to_string(c.line) + ": bad probability");
    total += pv.q;
    State next = cur;
    std::vector<int> w = written;
    for (const auto& a : b.assignments) {
      if (std::find(w.begin(), w.end(), a.var) != w.end())
        throw ConflictingWrite("variable " + g.vars[a.var].name + " written twice in one transition (line " +
                               std::to_string(c.line) + ")");
      w.push_back(a.var);
      Value v = ev.eval(*a.value);
      if (v.is_bool || v.q.denominator() != 1)
        throw GcError("line " + std::to_string(c.line) + ": non-integer assignment");
      next[a.var] = v.q.numerator();
    }
    combine(g, s, ev, cmds, k + 1, next, w, p * pv.q, out);
  }
  if (total != Rational(1))
    throw GcError("line " + std::to_string(c.line) + ": probabilities sum to " + to_string(total));
}

}  // namespace

Value evaluate(const GcModel& g, const Expr& e, const State& s) {
  Evaluator ev(g, s);
  return ev.eval(e);
}

bool holds(const GcModel& g, const ExprPtr& e, const State& s) {
  Evaluator ev(g, s);
  return ev.truth(*e);
}

State initial_state(const GcModel& g) {
  State s;
  for (const auto& v : g.vars) s.push_back(v.init);
  return s;
}

std::vector<std::pair<std::string, Outcome>> successors(const GcModel& g, const State& s) {
  Evaluator ev(g, s);
  std::vector<std::pair<std::string, Outcome>> out;
  std::set<std::string> labels;
  for (const auto& m : g.modules) {
    labels.insert(m.alphabet.begin(), m.alphabet.end());
    for (const auto& c : m.commands) {
      if (!c.label.empty() || !ev.truth(*c.guard)) continue;
      Outcome o;
      State cur = s;
      std::vector<int> w;
      combine(g, s, ev, {&c}, 0, cur, w, Rational(1), o);
      out.push_back({"", std::move(o)});
    }
  }
  for (const auto& label : labels) {
    std::vector<std::vector<const Command*>> per_module;
    bool blocked = false;
    for (const auto& m : g.modules) {
      if (!std::binary_search(m.alphabet.begin(), m.alphabet.end(), label)) continue;
      std::vector<const Command*> en;
      for (const auto& c : m.commands)
        if (c.label == label && ev.truth(*c.guard)) en.push_back(&c);
      if (en.empty()) {
        blocked = true;
        break;
      }
      per_module.push_back(std::move(en));
    }
    if (blocked || per_module.empty()) continue;
    std::vector<std::size_t> idx(per_module.size(), 0);
    while (true) {
      std::vector<const Command*> cmds;
      for (std::size_t i = 0; i < per_module.size(); ++i) cmds.push_back(per_module[i][idx[i]]);
      Outcome o;
      State cur = s;
      std::vector<int> w;
      combine(g, s, ev, cmds, 0, cur, w, Rational(1), o);
      out.push_back({label, std::move(o)});
      int k = static_cast<int>(idx.size()) - 1;
      while (k >= 0 && ++idx[k] == per_module[k].size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }
  return out;
}

GcMdp build(const GcModel& g, std::size_t max_states) {
  GcMdp mdp;
  std::map<State, int> index;
  mdp.states.push_back(initial_state(g));
  mdp.choices.emplace_back();
  index[mdp.states[0]] = 0;
  for (std::size_t i = 0; i < mdp.states.size(); ++i) {
    for (auto& [label, outcome] : successors(g, mdp.states[i])) {
      GcChoice ch;
      ch.label = label;
      for (auto& [st, p] : outcome) {
        auto it = index.find(st);
        if (it == index.end()) {
          if (mdp.states.size() >= max_states) {
            mdp.truncated = true;
            continue;
          }
          it = index.emplace(st, static_cast<int>(mdp.states.size())).first;
          mdp.states.push_back(st);
          mdp.choices.emplace_back();
        }
        ch.dist.push_back({it->second, p});
      }
      std::sort(ch.dist.begin(), ch.dist.end());
      mdp.choices[i].push_back(std::move(ch));
    }
  }
  return mdp;
}

namespace {

std::string show_state(const GcModel& g, const State& s) {
  std::string out;
  for (std::size_t v = 0; v < s.size(); ++v)
    if (s[v] != 0) out += (out.empty() ? "" : ",") + g.vars[v].name + "=" + std::to_string(s[v]);
  return "(" + out + ")";
}

}  // namespace

Quotient quotient(const GcModel& g, const GcMdp& mdp) {
  auto stable_it = g.labels.find("stable");
  if (stable_it == g.labels.end()) throw GcError("model has no \"stable\" label");
  const std::size_t n = mdp.states.size();
  std::vector<char> stable(n);
  for (std::size_t i = 0; i < n; ++i) stable[i] = holds(g, stable_it->second, mdp.states[i]);

  std::vector<int> memo(n, -1);  // -1 unknown, -2 in progress
  std::function<int(int)> closure = [&](int t) -> int {
    if (stable[t]) return t;
    if (memo[t] >= 0) return memo[t];
    if (memo[t] == -2) throw NonConfluentChain("cyclic bookkeeping chain at " + show_state(g, mdp.states[t]));
    memo[t] = -2;
    if (mdp.choices[t].empty()) throw NonConfluentChain("bookkeeping state without a successor: " + show_state(g, mdp.states[t]));
    int result = -1;
    for (const auto& c : mdp.choices[t]) {
      if (c.dist.size() != 1) throw NonConfluentChain("probabilistic step inside a bookkeeping chain at " + show_state(g, mdp.states[t]));
      int r = closure(c.dist[0].first);
      if (result >= 0 && r != result) throw NonConfluentChain("bookkeeping chain from " + show_state(g, mdp.states[t]) +
                                                          " reaches different stable states");
      result = r;
    }
    memo[t] = result;
    return result;
  };

  Quotient q;
  for (std::size_t i = 0; i < n; ++i)
    if (stable[i]) {
      q.position[static_cast<int>(i)] = static_cast<int>(q.stable.size());
      q.stable.push_back(static_cast<int>(i));
    }
  for (int s : q.stable) {
    std::vector<std::pair<bool, std::vector<std::pair<int, Rational>>>> chs;
    for (const auto& c : mdp.choices[s]) {
      std::map<int, Rational> d;
      for (const auto& [t, p] : c.dist) d[closure(t)] += p;
      chs.push_back({c.label == "tick", {d.begin(), d.end()}});
    }
    q.choices.push_back(std::move(chs));
  }
  return q;
}

void inject_fault(GcModel& g) {
  for (auto& m : g.modules)
    for (auto& c : m.commands) {
      if (!c.label.empty() && c.label != "tick") continue;
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Not;
      e->args = {c.guard};
      c.guard = e;
      return;
    }
  throw GcError("no command to corrupt");
}

}  // namespace palps::gc
