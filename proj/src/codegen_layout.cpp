#include "codegen_internal.hpp"
#include "palps/semantics.hpp"

#include <charconv>
#include <functional>
#include <set>

namespace palps {

namespace detail {

std::string ident(const std::string& name) {
  std::string out;
  for (char c : name) out += c == '\'' ? std::string("_p") : std::string(1, c);
  return out;
}

std::string rational_text(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

std::string conj(const std::vector<std::string>& parts) {
  std::string s;
  for (const auto& p : parts) {
    if (p.empty()) continue;
    s += s.empty() ? p : " & " + p;
  }
  return s;
}

namespace {

std::string loc_of(const Model& m, const LocRef& r) {
  if (r.myloc) throw Error("unresolved myloc in translated expression");
  return ident(m.location_name(r.loc));
}

bool mentions_env(const ArithExpr& e) {
  if (e.kind == ArithExpr::Kind::Count || e.kind == ArithExpr::Kind::Total) return true;
  for (const auto& a : e.args)
    if (mentions_env(a)) return true;
  return false;
}

bool mentions_env(const BoolExpr& e) {
  if (e.kind == BoolExpr::Kind::Cmp) return mentions_env(e.lhs);
  for (const auto& a : e.args)
    if (mentions_env(a)) return true;
  return false;
}

}  // namespace

std::string prism_arith(const Model& m, const ArithExpr& e) {
  using K = ArithExpr::Kind;
  auto bin = [&](const char* op) {
    return "(" + prism_arith(m, e.args[0]) + op + prism_arith(m, e.args[1]) + ")";
  };
  switch (e.kind) {
    case K::Const: {
      auto s = rational_text(e.constant);
      return e.constant.denominator() == 1 && e.constant >= Rational(0) ? s : "(" + s + ")";
    }
    case K::Attr:
      return ident(m.attributes.names().at(e.attribute)) + "_" + loc_of(m, e.where);
    case K::Count:
      return env_var(m, e.species, e.where.loc);
    case K::Total: {
      std::string s;
      for (std::size_t sp = 0; sp < m.species.size(); ++sp)
        s += (sp ? "+" : "") + env_var(m, SpeciesId{static_cast<int>(sp)}, e.where.loc);
      return m.species.empty() ? "0" : "(" + s + ")";
    }
    case K::Neg:
      return "(-" + prism_arith(m, e.args[0]) + ")";
    case K::Abs: {
      auto a = prism_arith(m, e.args[0]);
      return "max(" + a + ",-" + a + ")";
    }
    case K::Add: return bin("+");
    case K::Sub: return bin("-");
    case K::Mul: return bin("*");
    case K::Div: return bin("/");
    case K::Min:
    case K::Max:
      return std::string(e.kind == K::Min ? "min(" : "max(") + prism_arith(m, e.args[0]) + "," +
             prism_arith(m, e.args[1]) + ")";
  }
  return "0";
}

std::string prism_bool(const Model& m, const BoolExpr& e) {
  switch (e.kind) {
    case BoolExpr::Kind::True:
      return "true";
    case BoolExpr::Kind::Not:
      return "!" + prism_bool(m, e.args[0]);
    case BoolExpr::Kind::And:
      return "(" + prism_bool(m, e.args[0]) + " & " + prism_bool(m, e.args[1]) + ")";
    case BoolExpr::Kind::Cmp: {
      const char* op = e.op == CmpOp::Eq ? "=" : e.op == CmpOp::Le ? "<=" : ">=";
      return "(" + prism_arith(m, e.lhs) + op + rational_text(e.rhs) + ")";
    }
  }
  return "true";
}

std::vector<ResolvedHead> resolve_heads(const Model& m, TermId t, LocationId here) {
  std::vector<ResolvedHead> out;
  const Environment empty(m.habitat.size(), static_cast<int>(m.species.size()));
  std::function<void(TermId, std::vector<std::string>, int)> walk = [&](TermId cur, std::vector<std::string> path,
                                                                         int depth) {
    if (depth > 10000) throw Error("conditional nesting too deep");
    cur = m.unfold(cur);
    if (!cur.valid()) throw Error("unguarded or undefined process constant");
    const auto& n = m.terms.at(cur);
    if (n.kind != TermKind::Cond) {
      out.push_back({conj(path), cur});
      return;
    }
    for (const auto& [g, body] : n.guards) {
      BoolExpr local = substitute_myloc(g, here);
      if (!mentions_env(local)) {
        if (eval_bool(empty, m.attributes, local, here)) {
          walk(body, path, depth + 1);
          return;
        }
        continue;
      }
      auto text = prism_bool(m, local);
      auto with = path;
      with.push_back(text);
      walk(body, with, depth + 1);
      path.push_back("!" + text);
    }
  };
  walk(t, {}, 0);
  return out;
}

}  // namespace detail

std::string env_var(const Model& m, SpeciesId s, LocationId l) {
  return detail::ident(m.species_name(s)) + "_" + detail::ident(m.location_name(l));
}

std::string pool_var(const Model& m, SpeciesId s) { return "i_" + detail::ident(m.species_name(s)); }

namespace {

void check_scopes(const SystemNode& n, bool inside, int& restricts) {
  const bool here = n.kind == SystemNode::Kind::Restrict;
  if (here && inside) throw UnsupportedTerm("nested restriction");
  if (here) ++restricts;
  for (const auto& c : n.children) check_scopes(c, inside || here, restricts);
}

}  // namespace

GcLayout gc_layout(const Model& m) {
  GcLayout layout;
  int restricts = 0;
  check_scopes(m.system, false, restricts);
  if (restricts > 1) throw UnsupportedTerm("more than one restriction");
  for (const auto& [lower, higher] : m.policy.pairs())
    if (higher.kind == ActionLabel::Kind::Tick) throw UnsupportedTerm("tick as a higher-priority label");

  Semantics sem(m);
  Configuration init = sem.initial();
  std::set<int> scopes;
  for (const auto& ind : init.individuals) scopes.insert(ind.scope);
  for (const auto& p : init.procs) scopes.insert(p.scope);
  if (scopes.size() > 1) throw UnsupportedTerm("components in different restriction scopes");
  layout.scope = scopes.empty() ? -1 : *scopes.begin();

  std::set<ChannelId> rep_channels;
  for (const auto& sp : m.species) {
    if (sp.replicators.size() > 1) throw UnsupportedTerm("species " + sp.name + " has several replicators");
    for (const auto& r : sp.replicators) rep_channels.insert(r.channel);
  }

  const TermId nil = m.terms.find(TermNode{});
  for (std::size_t si = 0; si < m.species.size(); ++si) {
    SpeciesLayout sl;
    sl.species = SpeciesId{static_cast<int>(si)};
    std::vector<TermId> roots;
    for (const auto& ind : init.individuals)
      if (ind.species == sl.species) roots.push_back(ind.term);
    for (const auto& p : init.procs) {
      if (p.species != sl.species) continue;
      sl.has_replicator = true;
      sl.replicator_bound = p.remaining;
      sl.body = m.replicator_body(sl.species, p.replicator);
      roots.push_back(sl.body);
    }
    std::function<void(TermId)> visit = [&](TermId t) {
      if (sl.state_of.count(t)) return;
      sl.terms.push_back(t);
      sl.state_of[t] = static_cast<int>(sl.terms.size());
      std::vector<TermId> next;
      for (int l = 0; l < m.habitat.size(); ++l) {
        for (const auto& rh : detail::resolve_heads(m, t, LocationId{l})) {
          const auto& h = m.terms.at(rh.head);
          if (h.kind == TermKind::NSum) {
            for (const auto& [pfx, cont] : h.actions) {
              if (pfx.kind == PrefixKind::In && rep_channels.count(pfx.channel))
                throw UnsupportedTerm("input on a replication channel");
              next.push_back(m.unfold(cont));
            }
          } else if (h.kind == TermKind::PSum) {
            for (const auto& [p, b] : h.branches) next.push_back(m.unfold(b));
          } else if (h.kind == TermKind::GoUniform) {
            for (auto nb : m.habitat.neighbors(LocationId{l})) next.push_back(sem.go_term(nb, m.unfold(h.cont)));
          }
        }
      }
      for (auto n : next) visit(n);
    };
    for (auto r : roots) visit(r);
    if (nil.valid()) visit(nil);
    sl.done = nil.valid() ? sl.state_of.at(nil) : 0;
    sl.dying = sl.normal_states() + 1;
    sl.newborn = sl.normal_states() + 2;
    layout.species.push_back(std::move(sl));
  }

  for (std::size_t si = 0; si < m.species.size(); ++si) {
    const auto& sl = layout.species[si];
    int k = 0;
    auto base = detail::ident(m.species[si].name);
    for (const auto& ind : init.individuals) {
      if (ind.species != sl.species) continue;
      ModuleLayout ml;
      ml.species = sl.species;
      ml.index = ++k;
      ml.name = base + "_" + std::to_string(k);
      ml.init_state = sl.state_of.at(ind.term);
      ml.init_loc = ind.loc;
      layout.modules.push_back(ml);
    }
    int prev = -1;
    for (int b = 0; b < sl.replicator_bound; ++b) {
      ModuleLayout ml;
      ml.species = sl.species;
      ml.index = ++k;
      ml.name = base + "_" + std::to_string(k);
      ml.init_loc = LocationId{0};
      ml.spare = true;
      ml.prev_spare = prev;
      prev = static_cast<int>(layout.modules.size());
      layout.modules.push_back(ml);
    }
  }
  return layout;
}

}  // namespace palps
