#include "palps/model.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

namespace palps {

LocationId Habitat::add_location(const std::string& name) {
  if (auto l = find(name); l.valid()) return l;
  names_.push_back(name);
  neighbors_.emplace_back();
  return LocationId{static_cast<std::int32_t>(names_.size() - 1)};
}

void Habitat::connect(LocationId a, LocationId b) {
  if (a == b) {
    self_loop_ = true;
    return;
  }
  auto link = [this](LocationId x, LocationId y) {
    auto& v = neighbors_.at(x.value);
    auto it = std::lower_bound(v.begin(), v.end(), y);
    if (it == v.end() || *it != y) v.insert(it, y);
  };
  link(a, b);
  link(b, a);
}

LocationId Habitat::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return LocationId{static_cast<std::int32_t>(i)};
  return LocationId{};
}

bool Habitat::adjacent(LocationId a, LocationId b) const {
  const auto& v = neighbors_.at(a.value);
  return std::binary_search(v.begin(), v.end(), b);
}

namespace {

std::size_t hash_node(const TermNode& n) {
  std::size_t h = static_cast<std::size_t>(n.kind) + 0x51;
  for (const auto& [p, t] : n.actions) {
    hash_combine(h, static_cast<std::size_t>(p.kind));
    hash_combine(h, std::hash<std::int32_t>{}(p.channel.value));
    hash_combine(h, std::hash<std::int32_t>{}(p.target.value));
    hash_combine(h, std::hash<std::int32_t>{}(t.value));
  }
  for (const auto& [p, t] : n.branches) {
    hash_combine(h, std::hash<std::int64_t>{}(p.numerator()));
    hash_combine(h, std::hash<std::int64_t>{}(p.denominator()));
    hash_combine(h, std::hash<std::int32_t>{}(t.value));
  }
  for (const auto& [g, t] : n.guards) {
    hash_combine(h, hash_value(g));
    hash_combine(h, std::hash<std::int32_t>{}(t.value));
  }
  hash_combine(h, std::hash<std::int32_t>{}(n.species.value));
  hash_combine(h, std::hash<int>{}(n.constant));
  hash_combine(h, std::hash<std::int32_t>{}(n.cont.value));
  return h;
}

}  // namespace

TermId TermPool::intern(const TermNode& node) {
  std::size_t h = hash_node(node);
  auto& bucket = index_[h];
  for (auto id : bucket)
    if (nodes_[id] == node) return TermId{id};
  nodes_.push_back(node);
  auto id = static_cast<std::int32_t>(nodes_.size() - 1);
  bucket.push_back(id);
  return TermId{id};
}

TermId TermPool::find(const TermNode& node) const {
  auto it = index_.find(hash_node(node));
  if (it == index_.end()) return TermId{};
  for (auto id : it->second)
    if (nodes_[id] == node) return TermId{id};
  return TermId{};
}

TermId TermPool::nil() { return intern(TermNode{}); }

TermId TermPool::prefix(Prefix p, TermId cont) {
  TermNode n;
  n.kind = TermKind::NSum;
  n.actions.push_back({p, cont});
  return intern(n);
}

TermId TermPool::const_ref(SpeciesId s, int constant) {
  TermNode n;
  n.kind = TermKind::Const;
  n.species = s;
  n.constant = constant;
  return intern(n);
}

int SpeciesDef::find_constant(const std::string& n) const {
  for (std::size_t i = 0; i < constant_names.size(); ++i)
    if (constant_names[i] == n) return static_cast<int>(i);
  return -1;
}

bool LabelPattern::matches(const ActionLabel& a) const {
  if (a.kind != kind) return false;
  if (kind == ActionLabel::Kind::Tick) return true;
  if (a.go != go) return false;
  if (!go && a.channel != channel) return false;
  if (!loc.is_var() && loc.fixed != a.loc.value) return false;
  if (!species.is_var() && species.fixed != a.species.value) return false;
  return true;
}

const std::vector<ActionLabel>& Policy::higher_than(const ActionLabel& a) const {
  static const std::vector<ActionLabel> none;
  auto it = above_.find(a);
  return it == above_.end() ? none : it->second;
}

bool Policy::dominated(const ActionLabel& a, const std::set<ActionLabel>& enabled) const {
  for (const auto& b : higher_than(a))
    if (enabled.count(b)) return true;
  return false;
}

Policy policy_closure(const std::set<LabelPair>& raw) {
  std::map<ActionLabel, std::set<ActionLabel>> succ;
  for (const auto& [lo, hi] : raw) {
    if (lo.kind == ActionLabel::Kind::Tick && hi.kind == ActionLabel::Kind::Tick)
      throw Error("tick/tick policy pair is vacuous");
    succ[lo].insert(hi);
  }
  Policy p;
  for (const auto& [start, _] : succ) {
    // BFS from start, tracking parents so a cycle back to start can be reported.
    std::map<ActionLabel, ActionLabel> parent;
    std::vector<ActionLabel> queue{start};
    std::set<ActionLabel> seen;
    for (std::size_t i = 0; i < queue.size(); ++i) {
      auto cur = queue[i];
      auto it = succ.find(cur);
      if (it == succ.end()) continue;
      for (const auto& nxt : it->second) {
        if (nxt == start) {
          std::vector<ActionLabel> cycle{start};
          std::vector<ActionLabel> back;
          for (auto x = cur; x != start; x = parent.at(x)) back.push_back(x);
          cycle.insert(cycle.end(), back.rbegin(), back.rend());
          cycle.push_back(start);
          throw CycleError("policy closure contains a cycle", cycle);
        }
        if (seen.insert(nxt).second) {
          parent.emplace(nxt, cur);
          queue.push_back(nxt);
        }
      }
    }
    for (const auto& hi : seen) {
      p.pairs_.insert({start, hi});
      p.above_[start].push_back(hi);
      p.higher_set_.insert(hi);
    }
  }
  return p;
}

SpeciesId Model::find_species(const std::string& name) const {
  for (std::size_t i = 0; i < species.size(); ++i)
    if (species[i].name == name) return SpeciesId{static_cast<std::int32_t>(i)};
  return SpeciesId{};
}

ChannelId Model::find_channel(const std::string& name) const {
  for (std::size_t i = 0; i < channels.size(); ++i)
    if (channels[i] == name) return ChannelId{static_cast<std::int32_t>(i)};
  return ChannelId{};
}

ChannelId Model::channel(const std::string& name) {
  if (auto c = find_channel(name); c.valid()) return c;
  channels.push_back(name);
  return ChannelId{static_cast<std::int32_t>(channels.size() - 1)};
}

const RewardDef* Model::find_reward(const std::string& name) const {
  for (const auto& r : rewards)
    if (r.name == name) return &r;
  return nullptr;
}

TermId Model::unfold(TermId t) const {
  for (int guard = 0; guard <= terms.size(); ++guard) {
    const auto& n = terms.at(t);
    if (n.kind != TermKind::Const) return t;
    const auto& sp = species.at(n.species.value);
    if (n.constant < 0 || n.constant >= static_cast<int>(sp.constant_bodies.size())) return TermId{};
    t = sp.constant_bodies[n.constant];
    if (!t.valid()) return t;
  }
  return TermId{};
}

TermId Model::replicator_body(SpeciesId s, int replicator) const {
  const auto& r = species.at(s.value).replicators.at(replicator);
  const auto& sp = species.at(s.value);
  if (r.body < 0 || r.body >= static_cast<int>(sp.constant_bodies.size())) return TermId{};
  auto t = sp.constant_bodies[r.body];
  return t.valid() ? unfold(t) : t;
}

void finalize_model(Model& m) {
  m.terms.nil();
  const int n = m.terms.size();
  for (int i = 0; i < n; ++i) {
    const TermNode node = m.terms.at(TermId{i});
    if (node.kind != TermKind::GoUniform) continue;
    TermId cont = m.unfold(node.cont);
    if (!cont.valid()) continue;
    for (int l = 0; l < m.habitat.size(); ++l) m.terms.prefix(Prefix::go(LocationId{l}), cont);
  }
}

std::string label_to_string(const Model& m, const ActionLabel& a) {
  using K = ActionLabel::Kind;
  if (a.kind == K::Tick) return "tick";
  std::string head = a.kind == K::In ? "in" : a.kind == K::Out ? "out" : "tau";
  std::string chan = a.go ? "go" : m.channel_name(a.channel);
  return head + "(" + chan + "," + m.location_name(a.loc) + "," + m.species_name(a.species) + ")";
}

}  // namespace palps
