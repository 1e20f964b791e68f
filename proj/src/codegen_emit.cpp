#include "codegen_internal.hpp"
#include "palps/analysis.hpp"
#include "palps/semantics.hpp"

#include <algorithm>
#include <charconv>
#include <set>
#include <map>
#include <sstream>

namespace palps {

using detail::conj;
using detail::ident;
using detail::rational_text;
using detail::ResolvedHead;

namespace {

std::string fmt_double(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct SyncLabel {
  std::string name;
  ChannelId channel;
  int outputter = -1;
  int partner = -1;
};

class Emitter {
 public:
  Emitter(const Model& m, const GcLayout& g, std::vector<std::string> reward_channels)
      : m_(m), g_(g), sem_(m), reward_channels_(std::move(reward_channels)) {
    for (const auto& sl : g_.species) {
      auto& per = heads_[sl.species.value];
      per.resize(sl.normal_states() + 1);
      for (int q = 1; q <= sl.normal_states(); ++q)
        for (int l = 0; l < m_.habitat.size(); ++l)
          per[q].push_back(detail::resolve_heads(m_, sl.terms[q - 1], LocationId{l}));
    }
    for (std::size_t si = 0; si < m_.species.size(); ++si)
      for (const auto& r : m_.species[si].replicators) rep_species_[r.channel] = SpeciesId{static_cast<int>(si)};
  }

  std::string run();

 private:
  const Model& m_;
  const GcLayout& g_;
  Semantics sem_;
  std::map<int, std::vector<std::vector<std::vector<ResolvedHead>>>> heads_;  // species -> q -> loc
  std::map<ChannelId, SpeciesId> rep_species_;
  std::vector<SyncLabel> sync_labels_;
  std::map<ActionLabel, std::string> enabled_names_;
  std::vector<std::string> reward_channels_;

  const SpeciesLayout& layout_of(int module) const { return g_.species.at(g_.modules[module].species.value); }
  const std::vector<ResolvedHead>& heads(int module, int q, int l) const {
    return heads_.at(g_.modules[module].species.value)[q][l];
  }
  std::string at(int module, int q, int l, const std::string& guard) const {
    return conj({g_.state_var(module) + "=" + std::to_string(q), g_.loc_var(module) + "=" + std::to_string(l), guard});
  }
  bool alive_state(const SpeciesLayout& sl, int q) const { return sem_.alive(sl.terms[q - 1]); }
  int dest(const SpeciesLayout& sl, int from, TermId to) const {
    int k = sl.state_of.at(to);
    return alive_state(sl, from) && !sem_.alive(to) ? sl.dying : k;
  }
  bool visible(ChannelId c) const { return sem_.visible(c, g_.scope); }
  bool is_rep_channel(ChannelId c) const { return rep_species_.count(c) > 0; }
  bool has_pool(SpeciesId s) const { return g_.species.at(s.value).has_replicator; }

  /// Disjunction of module states whose head at some location satisfies `pred`.
  template <class Pred>
  std::vector<std::string> offers(int module, Pred pred) const;
  bool offers_prefix(int module, PrefixKind k, ChannelId c) const;

  std::string enabled(const ActionLabel& a) const;
  std::string sigma(const ActionLabel& a) const;

  void declarations(std::ostringstream& os);
  void formulas(std::ostringstream& os);
  void module(std::ostringstream& os, int j);
  void rewards(std::ostringstream& os);
};

template <class Pred>
std::vector<std::string> Emitter::offers(int j, Pred pred) const {
  std::vector<std::string> out;
  const auto& sl = layout_of(j);
  for (int q = 1; q <= sl.normal_states(); ++q)
    for (int l = 0; l < m_.habitat.size(); ++l)
      for (const auto& rh : heads(j, q, l))
        if (pred(m_.terms.at(rh.head), LocationId{l})) out.push_back("(" + at(j, q, l, rh.guard) + ")");
  return out;
}

bool Emitter::offers_prefix(int j, PrefixKind k, ChannelId c) const {
  return !offers(j, [&](const TermNode& n, LocationId) {
            if (n.kind != TermKind::NSum) return false;
            for (const auto& [p, cont] : n.actions)
              if (p.kind == k && p.channel == c) return true;
            return false;
          }).empty();
}

std::string disj(const std::vector<std::string>& parts) {
  if (parts.empty()) return "false";
  std::string s;
  for (const auto& p : parts) s += s.empty() ? p : " | " + p;
  return s;
}

std::string Emitter::enabled(const ActionLabel& a) const {
  using K = ActionLabel::Kind;
  auto offering = [&](int j, PrefixKind k) {
    return offers(j, [&](const TermNode& n, LocationId l) {
      if (l != a.loc || n.kind != TermKind::NSum) return false;
      for (const auto& [p, cont] : n.actions) {
        if (p.kind != k) continue;
        if (k == PrefixKind::Go ? m_.habitat.adjacent(l, p.target) : p.channel == a.channel) return true;
      }
      return false;
    });
  };
  std::vector<std::string> parts;
  for (std::size_t j = 0; j < g_.modules.size(); ++j) {
    const int x = static_cast<int>(j);
    if (g_.modules[j].species != a.species) continue;
    if (a.kind == K::In || a.kind == K::Out) {
      if (!visible(a.channel)) continue;
      auto o = offering(x, a.kind == K::In ? PrefixKind::In : PrefixKind::Out);
      parts.insert(parts.end(), o.begin(), o.end());
    } else if (a.go) {
      auto o = offering(x, PrefixKind::Go);
      parts.insert(parts.end(), o.begin(), o.end());
    } else if (is_rep_channel(a.channel)) {
      auto sp = rep_species_.at(a.channel);
      if (!has_pool(sp)) continue;
      auto o = offering(x, PrefixKind::Out);
      if (!o.empty()) parts.push_back("((" + disj(o) + ") & " + pool_var(m_, sp) + ">0)");
    } else {
      auto o = offering(x, PrefixKind::Out);
      if (o.empty()) continue;
      std::vector<std::string> partners;
      for (std::size_t y = 0; y < g_.modules.size(); ++y) {
        if (y == j) continue;
        auto i = offering(static_cast<int>(y), PrefixKind::In);
        partners.insert(partners.end(), i.begin(), i.end());
      }
      if (!partners.empty()) parts.push_back("((" + disj(o) + ") & (" + disj(partners) + "))");
    }
  }
  return disj(parts);
}

std::string enabled_name(const Model& m, const ActionLabel& a) {
  using K = ActionLabel::Kind;
  std::string kind = a.kind == K::In ? "in" : a.kind == K::Out ? "out" : "tau";
  std::string what = a.go ? std::string("go") : ident(m.channel_name(a.channel));
  return "e_" + kind + "_" + what + "_" + ident(m.location_name(a.loc)) + "_" + ident(m.species_name(a.species));
}

std::string Emitter::sigma(const ActionLabel& a) const {
  std::vector<std::string> higher;
  for (const auto& h : m_.policy.higher_than(a)) higher.push_back(enabled_names_.at(h));
  if (higher.empty()) return "";
  return "!(" + disj(higher) + ")";
}

void Emitter::declarations(std::ostringstream& os) {
  for (std::size_t a = 0; a < m_.attributes.names().size(); ++a)
    for (const auto& [key, v] : m_.attributes.entries())
      if (key.first == static_cast<int>(a))
        os << "const double " << ident(m_.attributes.names()[a]) << "_" << ident(m_.location_name(key.second))
           << " = " << fmt_double(v) << ";\n";
  if (!m_.attributes.entries().empty()) os << "\n";

  Configuration init = sem_.initial();
  for (const auto& sl : g_.species) {
    int cap = 0;
    for (const auto& md : g_.modules)
      if (md.species == sl.species) ++cap;
    for (int l = 0; l < m_.habitat.size(); ++l)
      os << "global " << env_var(m_, sl.species, LocationId{l}) << " : [0.." << cap << "] init "
         << init.env.count(LocationId{l}, sl.species) << ";\n";
    if (sl.has_replicator)
      os << "global " << pool_var(m_, sl.species) << " : [0.." << sl.replicator_bound << "] init "
         << sl.replicator_bound << ";\n";
  }
  os << "\n";
}

void Emitter::formulas(std::ostringstream& os) {
  std::string pact;
  for (std::size_t j = 0; j < g_.modules.size(); ++j)
    pact += (j ? "+" : "") + std::string("(") + g_.state_var(static_cast<int>(j)) + ">" +
            std::to_string(layout_of(static_cast<int>(j)).normal_states()) + "?1:0)";
  os << "formula pact = " << (pact.empty() ? "0" : pact) << ";\n";
  std::vector<std::string> probs;
  for (std::size_t j = 0; j < g_.modules.size(); ++j) {
    auto o = offers(static_cast<int>(j), [&](const TermNode& n, LocationId l) {
      return n.kind == TermKind::PSum || (n.kind == TermKind::GoUniform && !m_.habitat.neighbors(l).empty());
    });
    os << "formula prob_" << g_.modules[j].name << " = " << disj(o) << ";\n";
    probs.push_back("prob_" + g_.modules[j].name);
  }
  os << "formula prob_due = " << disj(probs) << ";\n";
  for (const auto& a : m_.policy.higher_labels()) {
    auto name = enabled_name(m_, a);
    enabled_names_[a] = name;
    os << "formula " << name << " = " << enabled(a) << ";\n";
  }
  os << "\n";
}

void Emitter::module(std::ostringstream& os, int j) {
  const auto& md = g_.modules[j];
  const auto& sl = layout_of(j);
  const std::string st = g_.state_var(j), lc = g_.loc_var(j);
  const std::string free = "pact=0 & !prob_due";
  auto set_st = [&](int k) { return "(" + st + "'=" + std::to_string(k) + ")"; };
  auto dec = [&](int l) {
    auto v = env_var(m_, md.species, LocationId{l});
    return "(" + v + "'=" + v + "-1)";
  };
  auto inc = [&](int l) {
    auto v = env_var(m_, md.species, LocationId{l});
    return "(" + v + "'=" + v + "+1)";
  };
  auto guard = [&](std::vector<std::string> parts) { return conj(parts); };

  os << "module " << md.name << "\n";
  os << "  " << st << " : [0.." << sl.max_state() << "] init " << md.init_state << ";\n";
  os << "  " << lc << " : [0.." << m_.habitat.size() - 1 << "] init " << md.init_loc.value << ";\n";

  const std::string tick_sigma = sigma(ActionLabel::tick());
  for (int q = 1; q <= sl.normal_states(); ++q) {
    for (int l = 0; l < m_.habitat.size(); ++l) {
      const LocationId here{l};
      for (const auto& rh : heads(j, q, l)) {
        const std::string base = at(j, q, l, rh.guard);
        const auto& h = m_.terms.at(rh.head);
        if (h.kind == TermKind::PSum) {
          std::vector<std::pair<int, Rational>> dist;
          for (const auto& [p, b] : h.branches) {
            int k = dest(sl, q, m_.unfold(b));
            auto it = std::find_if(dist.begin(), dist.end(), [&](const auto& d) { return d.first == k; });
            if (it != dist.end())
              it->second += p;
            else
              dist.push_back({k, p});
          }
          os << "  [prob] " << guard({base, "pact=0"}) << " -> ";
          for (std::size_t i = 0; i < dist.size(); ++i)
            os << (i ? " + " : "") << rational_text(dist[i].second) << ":" << set_st(dist[i].first);
          os << ";\n";
        } else if (h.kind == TermKind::GoUniform) {
          const auto& nb = m_.habitat.neighbors(here);
          if (nb.empty()) continue;
          os << "  [prob] " << guard({base, "pact=0"}) << " -> ";
          TermId cont = m_.unfold(h.cont);
          for (std::size_t i = 0; i < nb.size(); ++i)
            os << (i ? " + " : "") << "1/" << nb.size() << ":" << set_st(sl.state_of.at(sem_.go_term(nb[i], cont)));
          os << ";\n";
        } else if (h.kind == TermKind::Nil) {
          os << "  [tick] " << guard({base, free, tick_sigma}) << " -> " << set_st(dest(sl, q, rh.head)) << ";\n";
        } else if (h.kind == TermKind::NSum) {
          for (const auto& [pfx, cont_raw] : h.actions) {
            const TermId cont = m_.unfold(cont_raw);
            const int k = sl.state_of.at(cont);
            const bool dies = !sem_.alive(cont);
            const std::string direct = set_st(k) + (dies ? " & " + dec(l) : "");
            switch (pfx.kind) {
              case PrefixKind::Tick:
                os << "  [tick] " << guard({base, free, tick_sigma}) << " -> " << set_st(dest(sl, q, cont)) << ";\n";
                break;
              case PrefixKind::Go: {
                if (!m_.habitat.adjacent(here, pfx.target)) break;
                auto s = sigma(ActionLabel::tau_go(here, md.species));
                os << "  [] " << guard({base, free, s}) << " -> " << set_st(k) << " & (" << lc
                   << "'=" << pfx.target.value << ") & " << dec(l) << (dies ? "" : " & " + inc(pfx.target.value))
                   << ";\n";
                break;
              }
              case PrefixKind::In:
                if (visible(pfx.channel)) {
                  auto s = sigma(ActionLabel::in(pfx.channel, here, md.species));
                  os << "  [] " << guard({base, free, s}) << " -> " << direct << ";\n";
                }
                for (const auto& lab : sync_labels_) {
                  if (lab.channel != pfx.channel || lab.partner != j) continue;
                  os << "  [" << lab.name << "] " << guard({base, g_.loc_var(lab.outputter) + "=" + std::to_string(l)})
                     << " -> " << set_st(dest(sl, q, cont)) << ";\n";
                }
                break;
              case PrefixKind::Out: {
                if (visible(pfx.channel)) {
                  auto s = sigma(ActionLabel::out(pfx.channel, here, md.species));
                  os << "  [] " << guard({base, free, s}) << " -> " << direct << ";\n";
                }
                auto s = sigma(ActionLabel::tau(pfx.channel, here, md.species));
                const auto chan = ident(m_.channel_name(pfx.channel));
                if (is_rep_channel(pfx.channel)) {
                  auto sp = rep_species_.at(pfx.channel);
                  if (!has_pool(sp)) break;
                  for (std::size_t y = 0; y < g_.modules.size(); ++y) {
                    if (static_cast<int>(y) == j || !g_.modules[y].spare || g_.modules[y].species != sp) continue;
                    os << "  [" << chan << "_" << md.name << "_" << g_.modules[y].name << "] "
                       << guard({base, free, s, pool_var(m_, sp) + ">0"}) << " -> " << set_st(dest(sl, q, cont))
                       << ";\n";
                  }
                } else {
                  for (std::size_t y = 0; y < g_.modules.size(); ++y) {
                    if (static_cast<int>(y) == j || !offers_prefix(static_cast<int>(y), PrefixKind::In, pfx.channel))
                      continue;
                    os << "  [" << chan << "_" << md.name << "_" << g_.modules[y].name << "] "
                       << guard({base, free, s}) << " -> " << set_st(dest(sl, q, cont)) << ";\n";
                  }
                }
                break;
              }
            }
          }
        }
      }
    }
  }

  // Activation of a spare module by any outputter on its species' channel.
  if (md.spare) {
    std::string ready = md.prev_spare >= 0 ? g_.state_var(md.prev_spare) + "!=0" : "";
    for (const auto& lab : sync_labels_) {
      if (lab.partner != j || !is_rep_channel(lab.channel) || rep_species_.at(lab.channel) != md.species) continue;
      for (int l = 0; l < m_.habitat.size(); ++l)
        os << "  [" << lab.name << "] "
           << guard({st + "=0", ready, g_.loc_var(lab.outputter) + "=" + std::to_string(l)}) << " -> "
           << set_st(sl.newborn) << " & (" << lc << "'=" << l << ");\n";
    }
  }

  os << "  [tick] " << guard({st + "=0", free, tick_sigma}) << " -> true;\n";
  os << "  [prob] !prob_" << md.name << " & prob_due & pact=0 -> true;\n";
  if (sl.done > 0)
    for (int l = 0; l < m_.habitat.size(); ++l)
      os << "  [] " << st << "=" << sl.dying << " & " << lc << "=" << l << " -> " << set_st(sl.done) << " & " << dec(l)
         << ";\n";
  if (sl.has_replicator) {
    const bool born_alive = sem_.alive(sl.body);
    for (int l = 0; l < m_.habitat.size(); ++l)
      os << "  [] " << st << "=" << sl.newborn << " & " << lc << "=" << l << " -> "
         << set_st(sl.state_of.at(sl.body)) << (born_alive ? " & " + inc(l) : "") << " & ("
         << pool_var(m_, md.species) << "'=" << pool_var(m_, md.species) << "-1);\n";
  }
  os << "endmodule\n\n";
}

void Emitter::rewards(std::ostringstream& os) {
  using K = ActionLabel::Kind;
  for (const auto& r : m_.rewards) {
    os << "rewards \"" << r.name << "\"\n";
    for (const auto& [pat, v] : r.actions) {
      if (pat.kind == K::Tick) {
        os << "  [tick] true : " << rational_text(v) << ";\n";
        continue;
      }
      if (pat.kind != K::Tau || pat.go) throw UnsupportedTerm("action reward on a label without its own command");
      for (const auto& lab : sync_labels_) {
        if (lab.channel != pat.channel) continue;
        const auto& om = g_.modules[lab.outputter];
        if (!pat.species.is_var() && pat.species.fixed != om.species.value) continue;
        std::string g = pat.loc.is_var() ? "true" : g_.loc_var(lab.outputter) + "=" + std::to_string(pat.loc.fixed);
        os << "  [" << lab.name << "] " << g << " : " << rational_text(v) << ";\n";
      }
    }
    for (const auto& [pred, w] : r.states)
      os << "  " << detail::prism_bool(m_, pred) << " : " << detail::prism_arith(m_, w) << ";\n";
    os << "endrewards\n\n";
  }
  for (const auto& name : reward_channels_) {
    auto ch = m_.find_channel(name);
    if (!ch.valid()) throw Error("unknown reward channel " + name);
    os << "rewards \"" << ident(name) << "\"\n";
    for (const auto& lab : sync_labels_)
      if (lab.channel == ch) os << "  [" << lab.name << "] true : 1;\n";
    os << "endrewards\n\n";
  }
  os << "rewards \"ticks\"\n  [tick] true : 1;\nendrewards\n";
}

std::string Emitter::run() {
  // Sync labels are fixed before modules are printed so both sides agree.
  for (std::size_t x = 0; x < g_.modules.size(); ++x) {
    std::set<ChannelId> outs;
    const auto& sl = layout_of(static_cast<int>(x));
    for (int q = 1; q <= sl.normal_states(); ++q)
      for (int l = 0; l < m_.habitat.size(); ++l)
        for (const auto& rh : heads(static_cast<int>(x), q, l)) {
          const auto& h = m_.terms.at(rh.head);
          if (h.kind != TermKind::NSum) continue;
          for (const auto& [p, c] : h.actions)
            if (p.kind == PrefixKind::Out) outs.insert(p.channel);
        }
    for (auto ch : outs) {
      for (std::size_t y = 0; y < g_.modules.size(); ++y) {
        bool partner = is_rep_channel(ch)
                           ? y != x && g_.modules[y].spare && g_.modules[y].species == rep_species_.at(ch) &&
                                 has_pool(rep_species_.at(ch))
                           : y != x && offers_prefix(static_cast<int>(y), PrefixKind::In, ch);
        if (partner)
          sync_labels_.push_back({ident(m_.channel_name(ch)) + "_" + g_.modules[x].name + "_" + g_.modules[y].name, ch,
                                  static_cast<int>(x), static_cast<int>(y)});
      }
    }
  }
  std::ostringstream os;
  os << "mdp\n\n";
  declarations(os);
  formulas(os);
  for (std::size_t j = 0; j < g_.modules.size(); ++j) module(os, static_cast<int>(j));
  os << "label \"stable\" = pact=0;\n\n";
  rewards(os);
  return os.str();
}

}  // namespace

std::string emit_prism(const Model& m, const GcLayout& layout, const std::vector<std::string>& reward_channels) {
  return Emitter(m, layout, reward_channels).run();
}
std::string emit_prism(const Model& m) { return emit_prism(m, gc_layout(m)); }

std::string emit_props(const Model& m, const std::vector<std::string>& queries) {
  std::ostringstream os;
  for (const auto& text : queries) {
    Query q = parse_query(m, text);
    const char* opt = q.opt == Opt::Max ? "max" : q.opt == Opt::Min ? "min" : "";
    if (q.kind == Query::Kind::Until && !q.bound) {
      os << "P" << opt << "=? [ " << detail::prism_bool(m, q.left) << " U " << detail::prism_bool(m, q.right)
         << " ]\n";
    } else if (q.kind == Query::Kind::ReachReward) {
      os << "R{\"" << q.reward << "\"}" << opt << "=? [ F " << detail::prism_bool(m, q.right) << " ]\n";
    } else {
      os << "// tick-bounded, not a step bound: " << text << "\n";
    }
  }
  return os.str();
}

}  // namespace palps
