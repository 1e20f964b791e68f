#pragma once

#include "palps/core.hpp"

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace palps {

/// A location reference inside an expression: a concrete location or `myloc`.
struct LocRef {
  bool myloc = false;
  LocationId loc;

  static LocRef here() { return LocRef{true, LocationId{}}; }
  static LocRef at(LocationId l) { return LocRef{false, l}; }
  bool operator==(const LocRef&) const = default;
};

struct ArithExpr {
  enum class Kind { Const, Attr, Count, Total, Neg, Abs, Add, Sub, Mul, Div, Min, Max };

  Kind kind = Kind::Const;
  Rational constant{0};
  int attribute = -1;
  SpeciesId species;
  LocRef where;
  std::vector<ArithExpr> args;

  static ArithExpr number(Rational c);
  static ArithExpr attr(int attribute, LocRef where);
  static ArithExpr count(SpeciesId s, LocRef where);
  static ArithExpr total(LocRef where);
  static ArithExpr unary(Kind k, ArithExpr a);
  static ArithExpr binary(Kind k, ArithExpr a, ArithExpr b);

  bool operator==(const ArithExpr&) const = default;
};

enum class CmpOp { Eq, Le, Ge };

struct BoolExpr {
  enum class Kind { True, Not, And, Cmp };

  Kind kind = Kind::True;
  CmpOp op = CmpOp::Eq;
  ArithExpr lhs;
  Rational rhs{0};
  std::vector<BoolExpr> args;

  static BoolExpr truth();
  static BoolExpr negate(BoolExpr e);
  static BoolExpr conj(BoolExpr a, BoolExpr b);
  static BoolExpr compare(ArithExpr w, CmpOp op, Rational c);

  bool is_literal_true() const { return kind == Kind::True; }
  bool operator==(const BoolExpr&) const = default;
};

std::size_t hash_value(const ArithExpr& e);
std::size_t hash_value(const BoolExpr& e);

/// Replaces every `myloc` by the given location.
ArithExpr substitute_myloc(const ArithExpr& e, LocationId here);
BoolExpr substitute_myloc(const BoolExpr& e, LocationId here);
bool mentions_myloc(const BoolExpr& e);
bool mentions_myloc(const ArithExpr& e);

/// Attribute values psi_l, keyed by (attribute index, location).
class AttributeTable {
 public:
  int add_attribute(const std::string& name);
  int find(const std::string& name) const;
  void set(int attribute, LocationId loc, double value);
  std::optional<double> get(int attribute, LocationId loc) const;

  const std::vector<std::string>& names() const { return names_; }
  const std::map<std::pair<int, LocationId>, double>& entries() const { return values_; }

  bool operator==(const AttributeTable&) const = default;

 private:
  std::vector<std::string> names_;
  std::map<std::pair<int, LocationId>, double> values_;
};

/// Multiset of (location, species, count) triples with counts >= 1.
/// Stored densely; a zero cell is the absence of the triple.
class Environment {
 public:
  Environment() = default;
  Environment(int num_locations, int num_species);

  int num_locations() const { return locations_; }
  int num_species() const { return species_; }

  int count(LocationId l, SpeciesId s) const { return counts_[index(l, s)]; }
  int total_at(LocationId l) const;
  int total() const;
  int total_of(SpeciesId s) const;

  /// E (+) (s, l)
  Environment added(SpeciesId s, LocationId l) const;
  /// E (-) (s, l); throws BottomError when (l, s) is absent.
  Environment removed(SpeciesId s, LocationId l) const;
  void add(SpeciesId s, LocationId l);
  void remove(SpeciesId s, LocationId l);

  struct Entry {
    LocationId location;
    SpeciesId species;
    int count;
  };
  std::vector<Entry> entries() const;
  const std::vector<std::int32_t>& raw() const { return counts_; }

  bool operator==(const Environment&) const = default;

 private:
  std::size_t index(LocationId l, SpeciesId s) const {
    return static_cast<std::size_t>(l.value) * species_ + s.value;
  }

  int locations_ = 0;
  int species_ = 0;
  std::vector<std::int32_t> counts_;
};

/// The undefined result of removing an absent individual.
class BottomError : public Error {
 public:
  using Error::Error;
};

/// E (x) (E1, E2): applies the deltas of E1 and E2 against E.
Environment env_merge(const Environment& base, const Environment& first, const Environment& second);

class EvalError : public Error {
 public:
  enum class Kind { MissingAttribute, DivisionByZero, UnboundMyloc };
  EvalError(Kind k, const std::string& what) : Error(what), kind(k) {}
  Kind kind;
};

/// Result of arithmetic evaluation: exact while only rationals are involved.
struct Value {
  bool exact = true;
  Rational q{0};
  double d = 0.0;

  static Value of(Rational r) { return Value{true, r, 0.0}; }
  static Value of(double x) { return Value{false, Rational{0}, x}; }
  double as_double() const { return exact ? to_double(q) : d; }
};

Value eval_arith(const Environment& env, const AttributeTable& attrs, const ArithExpr& w,
                 std::optional<LocationId> here);
bool eval_bool(const Environment& env, const AttributeTable& attrs, const BoolExpr& e,
               std::optional<LocationId> here);

Value apply_unary(ArithExpr::Kind k, const Value& a);
Value apply_binary(ArithExpr::Kind k, const Value& a, const Value& b);
bool compare_values(const Value& lhs, CmpOp op, const Value& rhs);

}  // namespace palps
