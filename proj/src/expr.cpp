#include "palps/expr.hpp"

#include <algorithm>
#include <cmath>

namespace palps {

ArithExpr ArithExpr::number(Rational c) {
  ArithExpr e;
  e.kind = Kind::Const;
  e.constant = c;
  return e;
}

ArithExpr ArithExpr::attr(int attribute, LocRef where) {
  ArithExpr e;
  e.kind = Kind::Attr;
  e.attribute = attribute;
  e.where = where;
  return e;
}

ArithExpr ArithExpr::count(SpeciesId s, LocRef where) {
  ArithExpr e;
  e.kind = Kind::Count;
  e.species = s;
  e.where = where;
  return e;
}

ArithExpr ArithExpr::total(LocRef where) {
  ArithExpr e;
  e.kind = Kind::Total;
  e.where = where;
  return e;
}

ArithExpr ArithExpr::unary(Kind k, ArithExpr a) {
  ArithExpr e;
  e.kind = k;
  e.args.push_back(std::move(a));
  return e;
}

ArithExpr ArithExpr::binary(Kind k, ArithExpr a, ArithExpr b) {
  ArithExpr e;
  e.kind = k;
  e.args.push_back(std::move(a));
  e.args.push_back(std::move(b));
  return e;
}

BoolExpr BoolExpr::truth() { return BoolExpr{}; }

BoolExpr BoolExpr::negate(BoolExpr e) {
  BoolExpr r;
  r.kind = Kind::Not;
  r.args.push_back(std::move(e));
  return r;
}

BoolExpr BoolExpr::conj(BoolExpr a, BoolExpr b) {
  BoolExpr r;
  r.kind = Kind::And;
  r.args.push_back(std::move(a));
  r.args.push_back(std::move(b));
  return r;
}

BoolExpr BoolExpr::compare(ArithExpr w, CmpOp op, Rational c) {
  BoolExpr r;
  r.kind = Kind::Cmp;
  r.op = op;
  r.lhs = std::move(w);
  r.rhs = c;
  return r;
}

namespace {

std::size_t hash_rational(const Rational& r) {
  std::size_t h = std::hash<std::int64_t>{}(r.numerator());
  hash_combine(h, std::hash<std::int64_t>{}(r.denominator()));
  return h;
}

std::size_t hash_locref(const LocRef& l) {
  std::size_t h = l.myloc ? 1 : 2;
  hash_combine(h, std::hash<std::int32_t>{}(l.loc.value));
  return h;
}

}  // namespace

std::size_t hash_value(const ArithExpr& e) {
  std::size_t h = static_cast<std::size_t>(e.kind) * 31 + 7;
  hash_combine(h, hash_rational(e.constant));
  hash_combine(h, std::hash<int>{}(e.attribute));
  hash_combine(h, std::hash<std::int32_t>{}(e.species.value));
  hash_combine(h, hash_locref(e.where));
  for (const auto& a : e.args) hash_combine(h, hash_value(a));
  return h;
}

std::size_t hash_value(const BoolExpr& e) {
  std::size_t h = static_cast<std::size_t>(e.kind) * 17 + 3;
  hash_combine(h, static_cast<std::size_t>(e.op));
  if (e.kind == BoolExpr::Kind::Cmp) {
    hash_combine(h, hash_value(e.lhs));
    hash_combine(h, hash_rational(e.rhs));
  }
  for (const auto& a : e.args) hash_combine(h, hash_value(a));
  return h;
}

ArithExpr substitute_myloc(const ArithExpr& e, LocationId here) {
  ArithExpr r = e;
  if (r.where.myloc) r.where = LocRef::at(here);
  for (auto& a : r.args) a = substitute_myloc(a, here);
  return r;
}

BoolExpr substitute_myloc(const BoolExpr& e, LocationId here) {
  BoolExpr r = e;
  if (r.kind == BoolExpr::Kind::Cmp) r.lhs = substitute_myloc(r.lhs, here);
  for (auto& a : r.args) a = substitute_myloc(a, here);
  return r;
}

bool mentions_myloc(const ArithExpr& e) {
  if (e.where.myloc && (e.kind == ArithExpr::Kind::Attr || e.kind == ArithExpr::Kind::Count ||
                        e.kind == ArithExpr::Kind::Total))
    return true;
  return std::any_of(e.args.begin(), e.args.end(), [](const ArithExpr& a) { return mentions_myloc(a); });
}

bool mentions_myloc(const BoolExpr& e) {
  if (e.kind == BoolExpr::Kind::Cmp && mentions_myloc(e.lhs)) return true;
  return std::any_of(e.args.begin(), e.args.end(), [](const BoolExpr& a) { return mentions_myloc(a); });
}

int AttributeTable::add_attribute(const std::string& name) {
  if (int i = find(name); i >= 0) return i;
  names_.push_back(name);
  return static_cast<int>(names_.size()) - 1;
}

int AttributeTable::find(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return static_cast<int>(i);
  return -1;
}

void AttributeTable::set(int attribute, LocationId loc, double value) { values_[{attribute, loc}] = value; }

std::optional<double> AttributeTable::get(int attribute, LocationId loc) const {
  auto it = values_.find({attribute, loc});
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

Environment::Environment(int num_locations, int num_species)
    : locations_(num_locations),
      species_(num_species),
      counts_(static_cast<std::size_t>(num_locations) * num_species, 0) {}

int Environment::total_at(LocationId l) const {
  int t = 0;
  for (int s = 0; s < species_; ++s) t += counts_[index(l, SpeciesId{s})];
  return t;
}

int Environment::total() const {
  int t = 0;
  for (auto c : counts_) t += c;
  return t;
}

int Environment::total_of(SpeciesId s) const {
  int t = 0;
  for (int l = 0; l < locations_; ++l) t += counts_[index(LocationId{l}, s)];
  return t;
}

Environment Environment::added(SpeciesId s, LocationId l) const {
  Environment r = *this;
  r.add(s, l);
  return r;
}

Environment Environment::removed(SpeciesId s, LocationId l) const {
  Environment r = *this;
  r.remove(s, l);
  return r;
}

void Environment::add(SpeciesId s, LocationId l) { ++counts_[index(l, s)]; }

void Environment::remove(SpeciesId s, LocationId l) {
  auto& c = counts_[index(l, s)];
  if (c <= 0) throw BottomError("removing an absent individual");
  --c;
}

std::vector<Environment::Entry> Environment::entries() const {
  std::vector<Entry> out;
  for (int l = 0; l < locations_; ++l)
    for (int s = 0; s < species_; ++s)
      if (int c = counts_[index(LocationId{l}, SpeciesId{s})]; c > 0)
        out.push_back(Entry{LocationId{l}, SpeciesId{s}, c});
  return out;
}

Environment env_merge(const Environment& base, const Environment& first, const Environment& second) {
  if (base.num_locations() != first.num_locations() || base.num_locations() != second.num_locations() ||
      base.num_species() != first.num_species() || base.num_species() != second.num_species())
    throw Error("environment shapes differ");
  Environment r = base;
  for (int l = 0; l < base.num_locations(); ++l) {
    for (int s = 0; s < base.num_species(); ++s) {
      LocationId li{l};
      SpeciesId si{s};
      int m = base.count(li, si);
      int v = m + (first.count(li, si) - m) + (second.count(li, si) - m);
      if (v < 0) throw BottomError("merged environment has a negative count");
      while (r.count(li, si) < v) r.add(si, li);
      while (r.count(li, si) > v) r.remove(si, li);
    }
  }
  return r;
}

namespace {

LocationId resolve(const LocRef& where, std::optional<LocationId> here) {
  if (!where.myloc) return where.loc;
  if (!here) throw EvalError(EvalError::Kind::UnboundMyloc, "myloc used outside an individual");
  return *here;
}

}  // namespace

Value apply_unary(ArithExpr::Kind k, const Value& a) {
  switch (k) {
    case ArithExpr::Kind::Neg:
      return a.exact ? Value::of(-a.q) : Value::of(-a.d);
    case ArithExpr::Kind::Abs:
      return a.exact ? Value::of(a.q < Rational(0) ? -a.q : a.q) : Value::of(std::fabs(a.d));
    default:
      throw Error("not a unary operator");
  }
}

Value apply_binary(ArithExpr::Kind k, const Value& a, const Value& b) {
  using K = ArithExpr::Kind;
  if (k == K::Div) {
    if ((b.exact && b.q == Rational(0)) || (!b.exact && b.d == 0.0))
      throw EvalError(EvalError::Kind::DivisionByZero, "division by zero");
  }
  if (a.exact && b.exact) {
    switch (k) {
      case K::Add: return Value::of(a.q + b.q);
      case K::Sub: return Value::of(a.q - b.q);
      case K::Mul: return Value::of(a.q * b.q);
      case K::Div: return Value::of(a.q / b.q);
      case K::Min: return Value::of(std::min(a.q, b.q));
      case K::Max: return Value::of(std::max(a.q, b.q));
      default: break;
    }
  } else {
    double x = a.as_double(), y = b.as_double();
    switch (k) {
      case K::Add: return Value::of(x + y);
      case K::Sub: return Value::of(x - y);
      case K::Mul: return Value::of(x * y);
      case K::Div: return Value::of(x / y);
      case K::Min: return Value::of(std::min(x, y));
      case K::Max: return Value::of(std::max(x, y));
      default: break;
    }
  }
  throw Error("not a binary operator");
}

bool compare_values(const Value& lhs, CmpOp op, const Value& rhs) {
  if (lhs.exact && rhs.exact) {
    switch (op) {
      case CmpOp::Eq: return lhs.q == rhs.q;
      case CmpOp::Le: return lhs.q <= rhs.q;
      case CmpOp::Ge: return lhs.q >= rhs.q;
    }
  }
  double x = lhs.as_double(), y = rhs.as_double();
  switch (op) {
    case CmpOp::Eq: return x == y;
    case CmpOp::Le: return x <= y;
    case CmpOp::Ge: return x >= y;
  }
  return false;
}

Value eval_arith(const Environment& env, const AttributeTable& attrs, const ArithExpr& w,
                 std::optional<LocationId> here) {
  using K = ArithExpr::Kind;
  switch (w.kind) {
    case K::Const:
      return Value::of(w.constant);
    case K::Attr: {
      LocationId l = resolve(w.where, here);
      auto v = attrs.get(w.attribute, l);
      if (!v) {
        std::string name = w.attribute >= 0 && w.attribute < static_cast<int>(attrs.names().size())
                               ? attrs.names()[w.attribute]
                               : "#" + std::to_string(w.attribute);
        throw EvalError(EvalError::Kind::MissingAttribute,
                        "missing attribute " + name + " at location #" + std::to_string(l.value));
      }
      return Value::of(*v);
    }
    case K::Count:
      return Value::of(Rational(env.count(resolve(w.where, here), w.species)));
    case K::Total:
      return Value::of(Rational(env.total_at(resolve(w.where, here))));
    case K::Neg:
    case K::Abs:
      return apply_unary(w.kind, eval_arith(env, attrs, w.args.at(0), here));
    default:
      return apply_binary(w.kind, eval_arith(env, attrs, w.args.at(0), here),
                          eval_arith(env, attrs, w.args.at(1), here));
  }
}

bool eval_bool(const Environment& env, const AttributeTable& attrs, const BoolExpr& e,
               std::optional<LocationId> here) {
  switch (e.kind) {
    case BoolExpr::Kind::True:
      return true;
    case BoolExpr::Kind::Not:
      return !eval_bool(env, attrs, e.args.at(0), here);
    case BoolExpr::Kind::And:
      return eval_bool(env, attrs, e.args.at(0), here) && eval_bool(env, attrs, e.args.at(1), here);
    case BoolExpr::Kind::Cmp:
      return compare_values(eval_arith(env, attrs, e.lhs, here), e.op, Value::of(e.rhs));
  }
  return false;
}

}  // namespace palps
