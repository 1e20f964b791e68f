#include "palps/parser.hpp"

#include <charconv>
#include <sstream>

namespace palps {

namespace {

std::string fmt_real(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

std::string loc_text(const Model& m, const LocRef& r) { return r.myloc ? "myloc" : m.location_name(r.loc); }

// Precedence: 1 additive, 2 multiplicative, 3 unary/primary.
std::string arith(const Model& m, const ArithExpr& e, int ctx) {
  using K = ArithExpr::Kind;
  auto wrap = [&](const std::string& s, int level) { return level < ctx ? "(" + s + ")" : s; };
  switch (e.kind) {
    case K::Const: {
      auto s = to_string(e.constant);
      bool plain = e.constant.denominator() == 1 && e.constant >= Rational(0);
      return plain || ctx == 0 ? s : "(" + s + ")";
    }
    case K::Attr:
      return m.attributes.names().at(e.attribute) + "@" + loc_text(m, e.where);
    case K::Count:
      return m.species_name(e.species) + "@" + loc_text(m, e.where);
    case K::Total:
      return "@" + loc_text(m, e.where);
    case K::Neg:
      return wrap("-" + arith(m, e.args[0], 3), 3);
    case K::Abs:
      return "abs(" + arith(m, e.args[0], 0) + ")";
    case K::Min:
    case K::Max:
      return std::string(e.kind == K::Min ? "min(" : "max(") + arith(m, e.args[0], 0) + ", " +
             arith(m, e.args[1], 0) + ")";
    case K::Add:
    case K::Sub:
      return wrap(arith(m, e.args[0], 1) + (e.kind == K::Add ? " + " : " - ") + arith(m, e.args[1], 2), 1);
    case K::Mul:
    case K::Div:
      return wrap(arith(m, e.args[0], 2) + (e.kind == K::Mul ? " * " : " / ") + arith(m, e.args[1], 3), 2);
  }
  return "?";
}

// Precedence: 1 conjunction, 2 negation/atom.
std::string boolean(const Model& m, const BoolExpr& e, int ctx) {
  switch (e.kind) {
    case BoolExpr::Kind::True:
      return "true";
    case BoolExpr::Kind::Not:
      return "!" + boolean(m, e.args[0], 3);
    case BoolExpr::Kind::And: {
      auto s = boolean(m, e.args[0], 1) + " & " + boolean(m, e.args[1], 2);
      return ctx > 1 ? "(" + s + ")" : s;
    }
    case BoolExpr::Kind::Cmp: {
      const char* op = e.op == CmpOp::Eq ? " = " : e.op == CmpOp::Le ? " <= " : " >= ";
      auto s = arith(m, e.lhs, 0) + op + to_string(e.rhs);
      return ctx > 2 ? "(" + s + ")" : s;
    }
  }
  return "?";
}

std::string term(const Model& m, TermId t, int ctx);

std::string prefix_text(const Model& m, const Prefix& p) {
  switch (p.kind) {
    case PrefixKind::Tick: return "tick.";
    case PrefixKind::In: return m.channel_name(p.channel) + "?.";
    case PrefixKind::Out: return m.channel_name(p.channel) + "!.";
    case PrefixKind::Go: return "go " + m.location_name(p.target) + " . ";
  }
  return "?";
}

// ctx: 0 full term, 1 summand body of a probabilistic branch, 2 prefix continuation.
std::string term(const Model& m, TermId t, int ctx) {
  const auto& n = m.terms.at(t);
  switch (n.kind) {
    case TermKind::Nil:
      return "0";
    case TermKind::NSum: {
      std::string s;
      for (std::size_t i = 0; i < n.actions.size(); ++i) {
        if (i) s += " + ";
        s += prefix_text(m, n.actions[i].first) + term(m, n.actions[i].second, 2);
      }
      return n.actions.size() > 1 && ctx >= 2 ? "(" + s + ")" : s;
    }
    case TermKind::PSum: {
      std::string s;
      for (std::size_t i = 0; i < n.branches.size(); ++i) {
        if (i) s += " (+) ";
        s += to_string(n.branches[i].first) + ": " + term(m, n.branches[i].second, 1);
      }
      return ctx >= 1 ? "(" + s + ")" : s;
    }
    case TermKind::Cond: {
      std::string s = "cond(";
      for (std::size_t i = 0; i < n.guards.size(); ++i) {
        if (i) s += "; ";
        s += boolean(m, n.guards[i].first, 0) + " -> " + term(m, n.guards[i].second, 0);
      }
      return s + ")";
    }
    case TermKind::Const:
      return m.species.at(n.species.value).constant_names.at(n.constant);
    case TermKind::GoUniform:
      return "disperse uniform nb(myloc) then " + term(m, n.cont, 2);
  }
  return "?";
}

std::string slot_text(const Model& m, const PatternSlot& s, bool is_loc) {
  if (s.var == "*l" || s.var == "*s") return "*";
  if (s.is_var()) return s.var;
  return is_loc ? m.location_name(LocationId{s.fixed}) : m.species_name(SpeciesId{s.fixed});
}

void system_block(const Model& m, const SystemNode& n, std::ostringstream& os, const std::string& indent);

void system_item(const Model& m, const SystemNode& n, std::ostringstream& os, const std::string& indent) {
  using K = SystemNode::Kind;
  os << indent;
  switch (n.kind) {
    case K::Located: {
      os << n.multiplicity << " of " << m.species_name(n.species) << ".";
      const auto& node = m.terms.at(n.term);
      if (node.kind == TermKind::Const && node.species == n.species)
        os << m.species[n.species.value].constant_names.at(node.constant);
      else
        os << "(" << term(m, n.term, 0) << ")";
      os << " at " << m.location_name(n.location) << ";\n";
      break;
    }
    case K::SpeciesProc:
      os << "replicator " << m.species_name(n.species);
      if (n.replicator != 0)
        os << "." << m.channel_name(m.species[n.species.value].replicators.at(n.replicator).channel);
      os << ";\n";
      break;
    default:
      os << "group ";
      system_block(m, n, os, indent);
      os << ";\n";
      break;
  }
}

void system_block(const Model& m, const SystemNode& n, std::ostringstream& os, const std::string& indent) {
  if (n.kind == SystemNode::Kind::Restrict) {
    if (n.children.size() == 1 && n.children[0].kind == SystemNode::Kind::Parallel) {
      system_block(m, n.children[0], os, indent);
    } else {
      os << "{\n";
      for (const auto& c : n.children) system_item(m, c, os, indent + "  ");
      os << indent << "}";
    }
    os << " restrict { ";
    for (std::size_t i = 0; i < n.channels.size(); ++i) os << (i ? ", " : "") << m.channel_name(n.channels[i]);
    os << " }";
    return;
  }
  if (n.kind != SystemNode::Kind::Parallel) {
    os << "{\n";
    system_item(m, n, os, indent + "  ");
    os << indent << "}";
    return;
  }
  os << "{\n";
  for (const auto& c : n.children) system_item(m, c, os, indent + "  ");
  os << indent << "}";
}

}  // namespace

std::string format_arith(const Model& m, const ArithExpr& e) { return arith(m, e, 0); }
std::string format_bool(const Model& m, const BoolExpr& e) { return boolean(m, e, 0); }
std::string format_term(const Model& m, TermId t) { return term(m, t, 0); }

std::string format_pattern(const Model& m, const LabelPattern& p) {
  using K = ActionLabel::Kind;
  if (p.kind == K::Tick) return "tick";
  std::string head = p.kind == K::In ? "in" : p.kind == K::Out ? "out" : "tau";
  return head + "(" + (p.go ? std::string("go") : m.channel_name(p.channel)) + ", " + slot_text(m, p.loc, true) +
         ", " + slot_text(m, p.species, false) + ")";
}

std::string format_model(const Model& m) {
  std::ostringstream os;
  if (!m.channels.empty()) {
    os << "channels: ";
    for (std::size_t i = 0; i < m.channels.size(); ++i) os << (i ? ", " : "") << m.channels[i];
    os << ";\n";
  }
  if (m.habitat.size() > 0) {
    os << "locations: ";
    for (int l = 0; l < m.habitat.size(); ++l) os << (l ? ", " : "") << m.habitat.name(LocationId{l});
    os << ";\n";
  }
  std::vector<std::string> edges;
  for (int l = 0; l < m.habitat.size(); ++l)
    for (auto n : m.habitat.neighbors(LocationId{l}))
      if (n.value > l) edges.push_back(m.habitat.name(LocationId{l}) + "-" + m.habitat.name(n));
  if (!edges.empty()) {
    os << "neighbors: ";
    for (std::size_t i = 0; i < edges.size(); ++i) os << (i ? ", " : "") << edges[i];
    os << ";\n";
  }
  for (std::size_t a = 0; a < m.attributes.names().size(); ++a) {
    os << "\nattribute " << m.attributes.names()[a] << " {";
    bool first = true;
    for (const auto& [key, v] : m.attributes.entries()) {
      if (key.first != static_cast<int>(a)) continue;
      os << (first ? " " : ", ") << m.location_name(key.second) << ": " << fmt_real(v);
      first = false;
    }
    os << " }\n";
  }
  for (const auto& sp : m.species) {
    os << "\nspecies " << sp.name << " {\n";
    for (std::size_t c = 0; c < sp.constant_names.size(); ++c) {
      os << "  process " << sp.constant_names[c] << " = ";
      os << (sp.constant_bodies[c].valid() ? term(m, sp.constant_bodies[c], 0) : std::string("0")) << ";\n";
    }
    for (std::size_t r = 0; r < sp.replicators.size(); ++r) {
      const auto& rep = sp.replicators[r];
      if (r == 0)
        os << "  bound " << rep.bound << ";\n  rep " << m.channel_name(rep.channel) << ";\n  init "
           << sp.constant_names.at(rep.body) << ";\n";
      else
        os << "  replicator " << m.channel_name(rep.channel) << " bound " << rep.bound << " init "
           << sp.constant_names.at(rep.body) << ";\n";
    }
    os << "}\n";
  }
  os << "\nsystem ";
  system_block(m, m.system, os, "");
  os << "\n";
  if (!m.policy.patterns.empty()) {
    os << "\npolicy {\n";
    for (const auto& p : m.policy.patterns)
      os << "  " << format_pattern(m, p.lower) << " < " << format_pattern(m, p.higher) << ";\n";
    os << "}\n";
  }
  for (const auto& r : m.rewards) {
    os << "\nrewards " << r.name << " {\n";
    for (const auto& [p, v] : r.actions) os << "  action " << format_pattern(m, p) << " : " << to_string(v) << ";\n";
    for (const auto& [pred, v] : r.states)
      os << "  state " << format_bool(m, pred) << " : " << format_arith(m, v) << ";\n";
    os << "}\n";
  }
  return os.str();
}

}  // namespace palps
