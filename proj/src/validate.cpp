#include "palps/model.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace palps {

Policy instantiate_wildcards(const std::vector<PolicyPattern>& patterns, const Model& m) {
  std::set<LabelPair> raw;
  const int nl = m.habitat.size();
  const int ns = static_cast<int>(m.species.size());
  for (const auto& pat : patterns) {
    // Variable name -> true for a location slot, false for a species slot.
    std::map<std::string, bool> vars;
    auto note = [&](const PatternSlot& slot, bool is_loc, const LabelPattern& lp) {
      if (lp.kind == ActionLabel::Kind::Tick) return;
      if (!slot.is_var()) {
        int limit = is_loc ? nl : ns;
        if (slot.fixed < 0 || slot.fixed >= limit)
          throw Error(std::string("policy pattern refers to an undeclared ") + (is_loc ? "location" : "species"));
        return;
      }
      auto [it, fresh] = vars.emplace(slot.var, is_loc);
      if (!fresh && it->second != is_loc)
        throw Error("policy variable " + slot.var + " used for both a location and a species");
    };
    for (const auto* lp : {&pat.lower, &pat.higher}) {
      if (lp->kind != ActionLabel::Kind::Tick && !lp->go &&
          (lp->channel.value < 0 || lp->channel.value >= static_cast<int>(m.channels.size())))
        throw Error("policy pattern refers to an undeclared channel");
      note(lp->loc, true, *lp);
      note(lp->species, false, *lp);
    }
    std::vector<std::string> names;
    std::vector<int> limits;
    for (const auto& [name, is_loc] : vars) {
      names.push_back(name);
      limits.push_back(is_loc ? nl : ns);
    }
    std::vector<int> val(names.size(), 0);
    auto slot_value = [&](const PatternSlot& s) {
      if (!s.is_var()) return s.fixed;
      for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == s.var) return val[i];
      return -1;
    };
    auto concrete = [&](const LabelPattern& lp) {
      ActionLabel a;
      a.kind = lp.kind;
      if (lp.kind == ActionLabel::Kind::Tick) return a;
      a.go = lp.go;
      a.channel = lp.go ? ChannelId{} : lp.channel;
      a.loc = LocationId{slot_value(lp.loc)};
      a.species = SpeciesId{slot_value(lp.species)};
      return a;
    };
    for (int l : limits)
      if (l == 0) goto next_pattern;
    while (true) {
      raw.insert({concrete(pat.lower), concrete(pat.higher)});
      std::size_t i = 0;
      for (; i < val.size(); ++i) {
        if (++val[i] < limits[i]) break;
        val[i] = 0;
      }
      if (i == val.size()) break;
    }
  next_pattern:;
  }
  Policy p = policy_closure(raw);
  p.patterns = patterns;
  return p;
}

bool ValidationReport::ok() const {
  for (const auto& f : findings)
    if (f.severity == Finding::Severity::Error) return false;
  return true;
}

std::vector<std::string> ValidationReport::errors() const {
  std::vector<std::string> out;
  for (const auto& f : findings)
    if (f.severity == Finding::Severity::Error) out.push_back(f.message);
  return out;
}

std::vector<std::string> ValidationReport::warnings() const {
  std::vector<std::string> out;
  for (const auto& f : findings)
    if (f.severity == Finding::Severity::Warning) out.push_back(f.message);
  return out;
}

namespace {

std::string fmt_double(double d) {
  std::ostringstream os;
  os.precision(12);
  os << d;
  return os.str();
}

class Validator {
 public:
  explicit Validator(const Model& m) : m_(m) {}

  ValidationReport run() {
    check_habitat();
    check_species();
    check_system(m_.system, {});
    for (int t = 0; t < m_.terms.size(); ++t)
      if (reachable_.count(t)) check_term(TermId{t});
    check_unguarded();
    return std::move(report_);
  }

 private:
  void error(const std::string& msg) { report_.findings.push_back({Finding::Severity::Error, msg}); }
  void warn(const std::string& msg) { report_.findings.push_back({Finding::Severity::Warning, msg}); }

  void check_habitat() {
    if (m_.habitat.size() == 0) error("habitat declares no locations");
    if (m_.habitat.has_self_loop()) error("neighbor relation has a self-loop");
  }

  void mark(TermId t) {
    if (!t.valid() || t.value >= m_.terms.size()) return;
    if (!reachable_.insert(t.value).second) return;
    const auto& n = m_.terms.at(t);
    for (const auto& [_, c] : n.actions) mark(c);
    for (const auto& [_, c] : n.branches) mark(c);
    for (const auto& [_, c] : n.guards) mark(c);
    if (n.kind == TermKind::GoUniform) mark(n.cont);
  }

  void check_species() {
    std::map<ChannelId, std::string> rep_owner;
    for (std::size_t si = 0; si < m_.species.size(); ++si) {
      const auto& sp = m_.species[si];
      for (std::size_t c = 0; c < sp.constant_bodies.size(); ++c) {
        if (!sp.constant_bodies[c].valid())
          error("species " + sp.name + ": constant " + sp.constant_names[c] + " is undefined");
        else
          mark(sp.constant_bodies[c]);
      }
      for (const auto& r : sp.replicators) {
        if (r.bound < 0) error("species " + sp.name + ": negative replication bound");
        if (r.body < 0 || r.body >= static_cast<int>(sp.constant_bodies.size()))
          error("species " + sp.name + ": replication body is undefined");
        auto [it, fresh] = rep_owner.emplace(r.channel, sp.name);
        if (!fresh && it->second != sp.name)
          error("rep channel " + m_.channel_name(r.channel) + " shared by species " + it->second + " and " +
                sp.name);
        else if (!fresh)
          error("species " + sp.name + " declares rep channel " + m_.channel_name(r.channel) + " twice");
      }
    }
  }

  void check_system(const SystemNode& n, std::vector<ChannelId> restricted) {
    using K = SystemNode::Kind;
    switch (n.kind) {
      case K::Located:
        if (n.multiplicity < 1) error("multiplicity must be at least 1");
        if (!n.location.valid() || n.location.value >= m_.habitat.size()) error("unknown location in system");
        if (!n.species.valid() || n.species.value >= static_cast<int>(m_.species.size()))
          error("unknown species in system");
        mark(n.term);
        break;
      case K::SpeciesProc: {
        if (!n.species.valid() || n.species.value >= static_cast<int>(m_.species.size())) {
          error("unknown species in system");
          break;
        }
        const auto& sp = m_.species[n.species.value];
        if (n.replicator < 0 || n.replicator >= static_cast<int>(sp.replicators.size())) {
          error("species " + sp.name + " has no such replicator");
          break;
        }
        auto c = sp.replicators[n.replicator].channel;
        if (std::find(restricted.begin(), restricted.end(), c) == restricted.end())
          error("rep channel " + m_.channel_name(c) + " of species " + sp.name + " is not restricted");
        break;
      }
      case K::Parallel:
        for (const auto& ch : n.children) check_system(ch, restricted);
        break;
      case K::Restrict:
        for (auto c : n.channels) {
          if (!c.valid() || c.value >= static_cast<int>(m_.channels.size())) error("restricted channel is undeclared");
          restricted.push_back(c);
        }
        for (const auto& ch : n.children) check_system(ch, restricted);
        break;
    }
  }

  void check_arith(const ArithExpr& w) {
    if (w.kind == ArithExpr::Kind::Attr) {
      if (w.attribute < 0 || w.attribute >= static_cast<int>(m_.attributes.names().size())) {
        error("unknown attribute");
      } else if (!w.where.myloc) {
        if (!m_.attributes.get(w.attribute, w.where.loc))
          error("attribute " + m_.attributes.names()[w.attribute] + " has no value at " +
                m_.location_name(w.where.loc));
      } else {
        for (int l = 0; l < m_.habitat.size(); ++l)
          if (!m_.attributes.get(w.attribute, LocationId{l})) {
            warn("attribute " + m_.attributes.names()[w.attribute] + " has no value at " +
                 m_.location_name(LocationId{l}));
            break;
          }
      }
    }
    for (const auto& a : w.args) check_arith(a);
  }

  void check_bool(const BoolExpr& e) {
    if (e.kind == BoolExpr::Kind::Cmp) check_arith(e.lhs);
    for (const auto& a : e.args) check_bool(a);
  }

  void check_term(TermId t) {
    const auto& n = m_.terms.at(t);
    switch (n.kind) {
      case TermKind::Nil:
        break;
      case TermKind::NSum:
        if (n.actions.empty()) error("empty nondeterministic sum");
        for (const auto& [p, _] : n.actions) {
          if (p.kind == PrefixKind::Go && (!p.target.valid() || p.target.value >= m_.habitat.size()))
            error("go to an unknown location");
          if ((p.kind == PrefixKind::In || p.kind == PrefixKind::Out) &&
              (!p.channel.valid() || p.channel.value >= static_cast<int>(m_.channels.size())))
            error("unknown channel");
        }
        break;
      case TermKind::PSum: {
        if (n.branches.empty()) error("empty probabilistic sum");
        Rational sum = 0;
        for (const auto& [p, _] : n.branches) {
          if (p <= Rational(0) || p > Rational(1)) error("probability " + to_string(p) + " outside (0,1]");
          sum += p;
        }
        if (std::abs(to_double(sum) - 1.0) > 1e-9) error("probabilities sum to " + fmt_double(to_double(sum)));
        break;
      }
      case TermKind::Cond:
        if (n.guards.empty()) error("empty conditional");
        for (const auto& [g, _] : n.guards) check_bool(g);
        if (!n.guards.empty() && !n.guards.back().first.is_literal_true())
          warn("conditional does not end with a literal true guard");
        break;
      case TermKind::Const: {
        if (!n.species.valid() || n.species.value >= static_cast<int>(m_.species.size())) {
          error("constant of unknown species");
          break;
        }
        const auto& sp = m_.species[n.species.value];
        if (n.constant < 0 || n.constant >= static_cast<int>(sp.constant_bodies.size()) ||
            !sp.constant_bodies[n.constant].valid())
          error("undefined constant in species " + sp.name);
        break;
      }
      case TermKind::GoUniform:
        for (int l = 0; l < m_.habitat.size(); ++l)
          if (m_.habitat.neighbors(LocationId{l}).empty()) {
            warn("location " + m_.location_name(LocationId{l}) + " has no neighbors; uniform dispersal is stuck there");
            break;
          }
        break;
    }
  }

  // Const and Cond resolve without an action; a cycle through them never reaches a prefix.
  void check_unguarded() {
    std::map<int, int> color;
    std::function<bool(int)> dfs = [&](int t) {
      color[t] = 1;
      const auto& n = m_.terms.at(TermId{t});
      std::vector<int> next;
      if (n.kind == TermKind::Const) {
        if (n.species.valid() && n.species.value < static_cast<int>(m_.species.size())) {
          const auto& sp = m_.species[n.species.value];
          if (n.constant >= 0 && n.constant < static_cast<int>(sp.constant_bodies.size()) &&
              sp.constant_bodies[n.constant].valid())
            next.push_back(sp.constant_bodies[n.constant].value);
        }
      } else if (n.kind == TermKind::Cond) {
        for (const auto& [_, c] : n.guards) next.push_back(c.value);
      }
      for (int x : next) {
        if (color[x] == 1) return true;
        if (color[x] == 0 && dfs(x)) return true;
      }
      color[t] = 2;
      return false;
    };
    for (int t : reachable_)
      if (color[t] == 0 && dfs(t)) {
        error("unguarded recursion through constants or conditionals");
        return;
      }
  }

  const Model& m_;
  ValidationReport report_;
  std::set<int> reachable_;
};

bool terms_equal(const Model& ma, TermId a, const Model& mb, TermId b) {
  const auto& x = ma.terms.at(a);
  const auto& y = mb.terms.at(b);
  if (x.kind != y.kind) return false;
  if (x.actions.size() != y.actions.size() || x.branches.size() != y.branches.size() ||
      x.guards.size() != y.guards.size())
    return false;
  for (std::size_t i = 0; i < x.actions.size(); ++i)
    if (!(x.actions[i].first == y.actions[i].first) ||
        !terms_equal(ma, x.actions[i].second, mb, y.actions[i].second))
      return false;
  for (std::size_t i = 0; i < x.branches.size(); ++i)
    if (x.branches[i].first != y.branches[i].first ||
        !terms_equal(ma, x.branches[i].second, mb, y.branches[i].second))
      return false;
  for (std::size_t i = 0; i < x.guards.size(); ++i)
    if (!(x.guards[i].first == y.guards[i].first) ||
        !terms_equal(ma, x.guards[i].second, mb, y.guards[i].second))
      return false;
  if (x.kind == TermKind::Const) return x.species == y.species && x.constant == y.constant;
  if (x.kind == TermKind::GoUniform) return terms_equal(ma, x.cont, mb, y.cont);
  return true;
}

bool systems_equal(const Model& ma, const SystemNode& a, const Model& mb, const SystemNode& b) {
  if (a.kind != b.kind || a.children.size() != b.children.size() || a.channels != b.channels) return false;
  if (a.kind == SystemNode::Kind::Located &&
      (a.species != b.species || a.location != b.location || a.multiplicity != b.multiplicity ||
       !terms_equal(ma, a.term, mb, b.term)))
    return false;
  if (a.kind == SystemNode::Kind::SpeciesProc && (a.species != b.species || a.replicator != b.replicator))
    return false;
  for (std::size_t i = 0; i < a.children.size(); ++i)
    if (!systems_equal(ma, a.children[i], mb, b.children[i])) return false;
  return true;
}

}  // namespace

ValidationReport validate_model(const Model& m) { return Validator(m).run(); }

bool structurally_equal(const Model& a, const Model& b) {
  if (!(a.habitat == b.habitat) || !(a.attributes == b.attributes) || a.channels != b.channels) return false;
  if (a.species.size() != b.species.size()) return false;
  for (std::size_t i = 0; i < a.species.size(); ++i) {
    const auto& x = a.species[i];
    const auto& y = b.species[i];
    if (x.name != y.name || x.constant_names != y.constant_names ||
        x.replicators.size() != y.replicators.size())
      return false;
    for (std::size_t r = 0; r < x.replicators.size(); ++r)
      if (x.replicators[r].channel != y.replicators[r].channel || x.replicators[r].bound != y.replicators[r].bound ||
          x.replicators[r].body != y.replicators[r].body)
        return false;
    for (std::size_t c = 0; c < x.constant_bodies.size(); ++c) {
      if (x.constant_bodies[c].valid() != y.constant_bodies[c].valid()) return false;
      if (x.constant_bodies[c].valid() && !terms_equal(a, x.constant_bodies[c], b, y.constant_bodies[c]))
        return false;
    }
  }
  if (!systems_equal(a, a.system, b, b.system)) return false;
  if (a.policy.patterns != b.policy.patterns || a.policy.pairs() != b.policy.pairs()) return false;
  return a.rewards == b.rewards;
}

}  // namespace palps
