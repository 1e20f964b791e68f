#include "palps/semantics.hpp"

#include <algorithm>

namespace palps {

namespace {

constexpr int kMaxCondDepth = 10000;
constexpr long kMaxProbProduct = 1L << 22;

}  // namespace

Semantics::Semantics(const Model& m, SemanticsOptions opt) : m_(m), opt_(opt) {
  initial_.env = Environment(m_.habitat.size(), static_cast<int>(m_.species.size()));
  collect(m_.system, -1, initial_);
}

void Semantics::collect(const SystemNode& n, int scope, Configuration& c) {
  using K = SystemNode::Kind;
  switch (n.kind) {
    case K::Located: {
      TermId t = m_.unfold(n.term);
      if (!t.valid()) throw Error("initial term of species " + m_.species_name(n.species) + " does not unfold");
      for (int k = 0; k < n.multiplicity; ++k) {
        c.individuals.push_back({c.next_id++, n.species, n.location, t, scope});
        if (alive(t)) c.env.add(n.species, n.location);
      }
      break;
    }
    case K::SpeciesProc: {
      const auto& rep = m_.species.at(n.species.value).replicators.at(n.replicator);
      c.procs.push_back({n.species, n.replicator, rep.bound, scope});
      break;
    }
    case K::Parallel:
      for (const auto& ch : n.children) collect(ch, scope, c);
      break;
    case K::Restrict: {
      int id = static_cast<int>(scope_parent_.size());
      scope_parent_.push_back(scope);
      std::vector<int> chain{id};
      if (scope >= 0) chain.insert(chain.end(), scope_chain_[scope].begin(), scope_chain_[scope].end());
      scope_chain_.push_back(chain);
      std::vector<bool> r(m_.channels.size(), false);
      for (auto ch : n.channels) r.at(ch.value) = true;
      scope_restricts_.push_back(std::move(r));
      for (const auto& ch : n.children) collect(ch, id, c);
      break;
    }
  }
}

Configuration Semantics::initial() const { return initial_; }

bool Semantics::restricted_in(int scope, ChannelId ch) const {
  const auto& r = scope_restricts_[scope];
  return ch.value < static_cast<int>(r.size()) && r[ch.value];
}

bool Semantics::visible(ChannelId ch, int scope) const {
  if (scope < 0) return true;
  for (int s : scope_chain_[scope])
    if (restricted_in(s, ch)) return false;
  return true;
}

bool Semantics::sync_allowed(ChannelId ch, int a, int b) const {
  static const std::vector<int> none;
  const auto& ca = a >= 0 ? scope_chain_[a] : none;
  const auto& cb = b >= 0 ? scope_chain_[b] : none;
  for (int s : ca)
    if (std::find(cb.begin(), cb.end(), s) == cb.end() && restricted_in(s, ch)) return false;
  for (int s : cb)
    if (std::find(ca.begin(), ca.end(), s) == ca.end() && restricted_in(s, ch)) return false;
  return true;
}

TermId Semantics::go_term(LocationId l, TermId cont) const {
  TermNode n;
  n.kind = TermKind::NSum;
  n.actions = {{Prefix::go(l), cont}};
  TermId t = m_.terms.find(n);
  if (!t.valid()) throw Error("model was not finalized: missing dispersal term");
  return t;
}

TermId Semantics::head(TermId t, LocationId loc, const Environment& env) const {
  for (int depth = 0; depth < kMaxCondDepth; ++depth) {
    const auto& n = m_.terms.at(t);
    if (n.kind == TermKind::Const) {
      t = m_.unfold(t);
      if (!t.valid()) throw Error("unguarded or undefined process constant");
      continue;
    }
    if (n.kind != TermKind::Cond) return t;
    TermId chosen;
    for (const auto& [g, body] : n.guards) {
      if (eval_bool(env, m_.attributes, g, loc)) {
        chosen = body;
        break;
      }
    }
    if (!chosen.valid()) return TermId{};
    t = chosen;
  }
  throw Error("conditional nesting too deep");
}

std::vector<ProbChoice> Semantics::prob_choices(const Configuration& c) const {
  std::vector<ProbChoice> out;
  for (std::size_t i = 0; i < c.individuals.size(); ++i) {
    const auto& ind = c.individuals[i];
    TermId h = head(ind.term, ind.loc, c.env);
    if (!h.valid()) continue;
    const auto& n = m_.terms.at(h);
    ProbChoice pc;
    pc.index = static_cast<int>(i);
    if (n.kind == TermKind::PSum) {
      for (const auto& [p, body] : n.branches) {
        TermId next = m_.unfold(body);
        auto it = std::find_if(pc.options.begin(), pc.options.end(), [&](const ProbOption& o) { return o.next == next; });
        if (it != pc.options.end())
          it->p += p;
        else
          pc.options.push_back({p, next, ind.loc});
      }
    } else if (n.kind == TermKind::GoUniform) {
      const auto& nb = m_.habitat.neighbors(ind.loc);
      if (nb.empty()) continue;
      TermId cont = m_.unfold(n.cont);
      Rational p(1, static_cast<std::int64_t>(nb.size()));
      for (auto l : nb) pc.options.push_back({p, go_term(l, cont), ind.loc});
    } else {
      continue;
    }
    out.push_back(std::move(pc));
  }
  return out;
}

std::vector<Move> Semantics::moves(const Configuration& c) const {
  std::vector<Move> out;
  const int n = static_cast<int>(c.individuals.size());
  std::vector<TermId> heads(n);
  for (int i = 0; i < n; ++i) {
    const auto& ind = c.individuals[i];
    heads[i] = head(ind.term, ind.loc, c.env);
    if (!heads[i].valid()) continue;
    auto k = m_.terms.at(heads[i]).kind;
    if (k == TermKind::PSum) return {};
    if (k == TermKind::GoUniform && !m_.habitat.neighbors(ind.loc).empty()) return {};
  }

  // Tick: every individual must offer one.
  std::vector<std::vector<TermId>> tick_opts(n);
  bool tick_ok = true;
  for (int i = 0; i < n && tick_ok; ++i) {
    if (!heads[i].valid()) {
      tick_ok = false;
      break;
    }
    const auto& node = m_.terms.at(heads[i]);
    if (node.kind == TermKind::Nil) {
      tick_opts[i].push_back(heads[i]);
    } else if (node.kind == TermKind::NSum) {
      for (const auto& [pfx, cont] : node.actions)
        if (pfx.kind == PrefixKind::Tick) {
          TermId t = m_.unfold(cont);
          if (std::find(tick_opts[i].begin(), tick_opts[i].end(), t) == tick_opts[i].end()) tick_opts[i].push_back(t);
        }
    }
    if (tick_opts[i].empty()) tick_ok = false;
  }
  if (tick_ok) {
    std::vector<std::size_t> idx(n, 0);
    while (true) {
      Move mv;
      mv.kind = Move::Kind::Tick;
      mv.label = ActionLabel::tick();
      for (int i = 0; i < n; ++i) mv.tick_next.push_back(tick_opts[i][idx[i]]);
      out.push_back(std::move(mv));
      int k = n - 1;
      while (k >= 0 && ++idx[k] == tick_opts[k].size()) idx[k--] = 0;
      if (k < 0) break;
    }
  }

  for (int i = 0; i < n; ++i) {
    if (!heads[i].valid()) continue;
    const auto& node = m_.terms.at(heads[i]);
    if (node.kind != TermKind::NSum) continue;
    const auto& ind = c.individuals[i];
    for (const auto& [pfx, cont] : node.actions) {
      Move mv;
      mv.a = i;
      mv.a_next = m_.unfold(cont);
      mv.a_loc = ind.loc;
      switch (pfx.kind) {
        case PrefixKind::Tick:
          break;
        case PrefixKind::Go:
          if (!m_.habitat.adjacent(ind.loc, pfx.target)) break;
          mv.kind = Move::Kind::Single;
          mv.label = ActionLabel::tau_go(ind.loc, ind.species);
          mv.a_loc = pfx.target;
          out.push_back(mv);
          break;
        case PrefixKind::In:
          if (!visible(pfx.channel, ind.scope)) break;
          mv.kind = Move::Kind::Single;
          mv.label = ActionLabel::in(pfx.channel, ind.loc, ind.species);
          out.push_back(mv);
          break;
        case PrefixKind::Out: {
          if (visible(pfx.channel, ind.scope)) {
            mv.kind = Move::Kind::Single;
            mv.label = ActionLabel::out(pfx.channel, ind.loc, ind.species);
            out.push_back(mv);
          }
          Move sync = mv;
          sync.kind = Move::Kind::Sync;
          sync.label = ActionLabel::tau(pfx.channel, ind.loc, ind.species);
          for (int j = 0; j < n; ++j) {
            if (j == i || !heads[j].valid() || c.individuals[j].loc != ind.loc) continue;
            if (!sync_allowed(pfx.channel, ind.scope, c.individuals[j].scope)) continue;
            const auto& other = m_.terms.at(heads[j]);
            if (other.kind != TermKind::NSum) continue;
            for (const auto& [q, qc] : other.actions) {
              if (q.kind != PrefixKind::In || q.channel != pfx.channel) continue;
              sync.b = j;
              sync.b_next = m_.unfold(qc);
              out.push_back(sync);
            }
          }
          Move rep = mv;
          rep.kind = Move::Kind::Rep;
          rep.label = sync.label;
          for (std::size_t k = 0; k < c.procs.size(); ++k) {
            const auto& pr = c.procs[k];
            const auto& r = m_.species.at(pr.species.value).replicators.at(pr.replicator);
            if (r.channel != pfx.channel) continue;
            if (!opt_.unbounded_replication && pr.remaining <= 0) continue;
            if (!sync_allowed(pfx.channel, ind.scope, pr.scope)) continue;
            rep.b = static_cast<int>(k);
            out.push_back(rep);
          }
          break;
        }
      }
    }
  }
  return out;
}

namespace {

void relocate(const Semantics& sem, Configuration& c, int idx, TermId next, LocationId loc) {
  auto& ind = c.individuals[idx];
  if (sem.alive(ind.term)) c.env.remove(ind.species, ind.loc);
  if (sem.alive(next)) c.env.add(ind.species, loc);
  ind.term = next;
  ind.loc = loc;
}

}  // namespace

Configuration Semantics::apply(const Configuration& c, const Move& mv) const {
  Configuration out = c;
  switch (mv.kind) {
    case Move::Kind::Tick:
      for (std::size_t i = 0; i < out.individuals.size(); ++i)
        relocate(*this, out, static_cast<int>(i), mv.tick_next[i], out.individuals[i].loc);
      break;
    case Move::Kind::Single:
      relocate(*this, out, mv.a, mv.a_next, mv.a_loc);
      break;
    case Move::Kind::Sync:
      relocate(*this, out, mv.a, mv.a_next, mv.a_loc);
      relocate(*this, out, mv.b, mv.b_next, out.individuals[mv.b].loc);
      break;
    case Move::Kind::Rep: {
      LocationId where = out.individuals[mv.a].loc;
      relocate(*this, out, mv.a, mv.a_next, mv.a_loc);
      auto& pr = out.procs[mv.b];
      if (!opt_.unbounded_replication) --pr.remaining;
      TermId body = m_.replicator_body(pr.species, pr.replicator);
      if (!body.valid()) throw Error("replicator body does not unfold");
      out.individuals.push_back({out.next_id++, pr.species, where, body, pr.scope});
      if (alive(body)) out.env.add(pr.species, where);
      break;
    }
  }
  return out;
}

Configuration Semantics::apply_prob(const Configuration& c, const std::vector<ProbChoice>& choices,
                                    const std::vector<int>& picks) const {
  Configuration out = c;
  for (std::size_t k = 0; k < choices.size(); ++k) {
    const auto& o = choices[k].options.at(picks[k]);
    relocate(*this, out, choices[k].index, o.next, o.loc);
  }
  return out;
}

std::vector<int> Semantics::participants(const Configuration& c, const Move& mv) const {
  switch (mv.kind) {
    case Move::Kind::Tick: {
      std::vector<int> ids;
      for (const auto& ind : c.individuals) ids.push_back(ind.id);
      return ids;
    }
    case Move::Kind::Sync:
      return {c.individuals[mv.a].id, c.individuals[mv.b].id};
    default:
      return {c.individuals[mv.a].id};
  }
}

std::vector<NondetStep> Semantics::nondet_steps(const Configuration& c) const {
  std::vector<NondetStep> out;
  for (const auto& mv : moves(c)) out.push_back({mv.label, apply(c, mv), participants(c, mv)});
  return out;
}

std::vector<ProbStep> Semantics::prob_steps(const Configuration& c) const {
  auto choices = prob_choices(c);
  if (choices.empty()) return {};
  long total = 1;
  for (const auto& ch : choices) {
    total *= static_cast<long>(ch.options.size());
    if (total > kMaxProbProduct) throw Error("probabilistic step has too many outcomes");
  }
  std::vector<ProbStep> out;
  std::vector<int> picks(choices.size(), 0);
  while (true) {
    Rational w(1);
    for (std::size_t k = 0; k < choices.size(); ++k) w *= choices[k].options[picks[k]].p;
    out.push_back({w, apply_prob(c, choices, picks)});
    int k = static_cast<int>(choices.size()) - 1;
    while (k >= 0 && ++picks[k] == static_cast<int>(choices[k].options.size())) picks[k--] = 0;
    if (k < 0) break;
  }
  return out;
}

std::vector<NondetStep> Semantics::prioritized_steps(const Configuration& c, const Policy& p) const {
  auto all = nondet_steps(c);
  if (p.empty()) return all;
  std::set<ActionLabel> enabled;
  for (const auto& s : all) enabled.insert(s.label);
  std::vector<NondetStep> out;
  for (auto& s : all)
    if (!p.dominated(s.label, enabled)) out.push_back(std::move(s));
  return out;
}

bool compatible(const Model& m, const Configuration& c) {
  Environment want(m.habitat.size(), static_cast<int>(m.species.size()));
  for (const auto& ind : c.individuals)
    if (m.terms.at(ind.term).kind != TermKind::Nil) want.add(ind.species, ind.loc);
  return want == c.env;
}

}  // namespace palps
