#include "palps/parser.hpp"

#include "lexer.hpp"

#include <algorithm>
#include <functional>

namespace palps {

using detail::Token;

namespace {

class Parser {
 public:
  Parser(std::vector<Token> toks, Model& m) : toks_(std::move(toks)), m_(m) {}

  void parse_file() {
    prescan();
    bool have_system = false;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind != Token::Kind::Ident) fail(t, "expected a declaration");
      if (t.text == "channels") parse_channels();
      else if (t.text == "locations") parse_locations();
      else if (t.text == "neighbors") parse_neighbors();
      else if (t.text == "attribute") parse_attribute();
      else if (t.text == "species") parse_species();
      else if (t.text == "system") {
        if (have_system) fail(t, "duplicate system block");
        parse_system();
        have_system = true;
      } else if (t.text == "policy") parse_policy();
      else if (t.text == "rewards") parse_rewards();
      else fail(t, "unknown declaration '" + t.text + "'");
    }
    if (!have_system) fail(peek(), "missing system block");
    try {
      m_.policy = instantiate_wildcards(patterns_, m_);
    } catch (const CycleError& e) {
      std::string cyc;
      for (std::size_t i = 0; i < e.cycle.size(); ++i)
        cyc += (i ? " < " : "") + label_to_string(m_, e.cycle[i]);
      throw SyntaxError({{policy_span_, "policy is not a partial order: " + cyc}});
    } catch (const Error& e) {
      throw SyntaxError({{policy_span_, e.what()}});
    }
  }

  // Expression entry points used by parse_predicate / parse_arith.
  BoolExpr whole_bool() {
    auto e = parse_bool(false);
    if (!at_end()) fail(peek(), "unexpected trailing input");
    return e;
  }
  ArithExpr whole_arith() {
    auto e = parse_arith(false);
    if (!at_end()) fail(peek(), "unexpected trailing input");
    return e;
  }

 private:
  // ---- token helpers ----
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  bool is(const std::string& s, std::size_t k = 0) const {
    const auto& t = peek(k);
    return (t.kind == Token::Kind::Punct || t.kind == Token::Kind::Ident) && t.text == s;
  }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void fail(const Token& t, const std::string& msg) const { throw SyntaxError({{t.span, msg}}); }
  void expect(const std::string& s) {
    if (!is(s)) fail(peek(), "expected '" + s + "'" + (at_end() ? std::string(" at end of input") : ", found '" + peek().text + "'"));
    next();
  }
  bool accept(const std::string& s) {
    if (!is(s)) return false;
    next();
    return true;
  }
  std::string expect_ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) fail(peek(), std::string("expected ") + what);
    return next().text;
  }
  std::string expect_name(const char* what) {
    if (peek().kind != Token::Kind::Ident && peek().kind != Token::Kind::Number) fail(peek(), std::string("expected ") + what);
    return next().text;
  }
  int expect_int(const char* what) {
    if (peek().kind != Token::Kind::Number || peek().text.find('.') != std::string::npos)
      fail(peek(), std::string("expected ") + what);
    const auto& t = next();
    if (t.text.size() > 9) fail(t, "integer too large");
    return std::stoi(t.text);
  }

  // ---- prescan: names that may be used before their declaration ----
  void prescan() {
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.kind != Token::Kind::Ident) continue;
      const auto& n1 = toks_[i + 1];
      if (t.text == "species" && n1.kind == Token::Kind::Ident && i + 2 < toks_.size() && toks_[i + 2].text == "{") {
        if (m_.find_species(n1.text).valid()) fail(n1, "species " + n1.text + " declared twice");
        m_.species.push_back(SpeciesDef{n1.text, {}, {}, {}});
      } else if (t.text == "attribute" && n1.kind == Token::Kind::Ident && i + 2 < toks_.size() &&
                 toks_[i + 2].text == "{") {
        m_.attributes.add_attribute(n1.text);
      } else if (t.text == "locations" && n1.text == ":") {
        std::size_t j = i + 2;
        while (j < toks_.size() &&
               (toks_[j].kind == Token::Kind::Ident || toks_[j].kind == Token::Kind::Number)) {
          if (m_.habitat.find(toks_[j].text).valid()) fail(toks_[j], "location " + toks_[j].text + " declared twice");
          m_.habitat.add_location(toks_[j].text);
          if (j + 1 < toks_.size() && toks_[j + 1].text == ",") j += 2;
          else break;
        }
      }
    }
    for (const auto& sp : m_.species)
      if (m_.attributes.find(sp.name) >= 0) fail(toks_[0], "name " + sp.name + " is both a species and an attribute");
  }

  // ---- declarations ----
  void parse_channels() {
    next();
    expect(":");
    do m_.channel(expect_ident("a channel name"));
    while (accept(","));
    accept(";");
  }

  void parse_locations() {
    next();
    expect(":");
    do expect_name("a location name");
    while (accept(","));
    accept(";");
  }

  LocationId location() {
    const Token& t = peek();
    auto name = expect_name("a location");
    auto l = m_.habitat.find(name);
    if (!l.valid()) fail(t, "unknown location '" + name + "'");
    return l;
  }

  void parse_neighbors() {
    next();
    expect(":");
    do {
      auto a = location();
      expect("-");
      auto b = location();
      m_.habitat.connect(a, b);
    } while (accept(","));
    accept(";");
  }

  double number_value() {
    bool neg = accept("-");
    if (peek().kind != Token::Kind::Number) fail(peek(), "expected a number");
    double v = std::stod(next().text);
    return neg ? -v : v;
  }

  void parse_attribute() {
    next();
    int a = m_.attributes.find(expect_ident("an attribute name"));
    expect("{");
    while (!is("}")) {
      auto l = location();
      expect(":");
      m_.attributes.set(a, l, number_value());
      if (!accept(",")) accept(";");
    }
    expect("}");
  }

  void parse_species() {
    next();
    auto name = expect_ident("a species name");
    SpeciesId s = m_.find_species(name);
    auto& sp = m_.species[s.value];
    expect("{");
    // Register every process name of the block so bodies may refer forward.
    int depth = 0;
    for (std::size_t j = pos_; j + 2 < toks_.size(); ++j) {
      if (toks_[j].text == "{" && toks_[j].kind == Token::Kind::Punct) ++depth;
      if (toks_[j].text == "}" && toks_[j].kind == Token::Kind::Punct) {
        if (depth == 0) break;
        --depth;
      }
      if (depth == 0 && toks_[j].kind == Token::Kind::Ident && toks_[j].text == "process" &&
          toks_[j + 1].kind == Token::Kind::Ident && toks_[j + 2].text == "=") {
        if (sp.find_constant(toks_[j + 1].text) >= 0) fail(toks_[j + 1], "process " + toks_[j + 1].text + " defined twice");
        sp.constant_names.push_back(toks_[j + 1].text);
        m_.species[s.value].constant_bodies.push_back(TermId{});
      }
    }
    std::optional<int> bound;
    std::optional<ChannelId> rep;
    std::optional<int> init;
    const Token* first_rep_tok = nullptr;
    std::vector<Replicator> extra;
    while (!is("}")) {
      const Token& t = peek();
      auto kw = expect_ident("a species item");
      if (kw == "process") {
        auto pname = expect_ident("a process name");
        expect("=");
        auto body = parse_term(s);
        m_.species[s.value].constant_bodies[m_.species[s.value].find_constant(pname)] = body;
      } else if (kw == "bound") {
        bound = expect_int("a replication bound");
        first_rep_tok = &t;
      } else if (kw == "rep") {
        rep = m_.channel(expect_ident("a rep channel"));
        first_rep_tok = &t;
      } else if (kw == "init") {
        init = constant_index(s);
      } else if (kw == "replicator") {
        Replicator r;
        r.channel = m_.channel(expect_ident("a rep channel"));
        if (!is("bound")) fail(peek(), "expected 'bound'");
        next();
        r.bound = expect_int("a replication bound");
        if (!is("init")) fail(peek(), "expected 'init'");
        next();
        r.body = constant_index(s);
        extra.push_back(r);
      } else {
        fail(t, "unknown species item '" + kw + "'");
      }
      expect(";");
    }
    expect("}");
    auto& spec = m_.species[s.value];
    if (init) {
      Replicator r;
      r.channel = rep ? *rep : m_.channel("rep");
      r.bound = bound.value_or(0);
      r.body = *init;
      spec.replicators.push_back(r);
    } else if (first_rep_tok) {
      fail(*first_rep_tok, "replication settings without 'init'");
    }
    for (const auto& r : extra) spec.replicators.push_back(r);
  }

  int constant_index(SpeciesId s) {
    const Token& t = peek();
    auto n = expect_ident("a process name");
    int c = m_.species[s.value].find_constant(n);
    if (c < 0) fail(t, "undefined process '" + n + "' in species " + m_.species[s.value].name);
    return c;
  }

  SpeciesId species_ref() {
    const Token& t = peek();
    auto n = expect_ident("a species name");
    auto s = m_.find_species(n);
    if (!s.valid()) fail(t, "unknown species '" + n + "'");
    return s;
  }

  ChannelId declared_channel() {
    const Token& t = peek();
    auto n = expect_ident("a channel name");
    auto c = m_.find_channel(n);
    if (!c.valid()) fail(t, "undeclared channel '" + n + "'");
    return c;
  }

  void parse_system() {
    next();
    m_.system = system_block();
  }

  SystemNode system_block() {
    SystemNode par;
    par.kind = SystemNode::Kind::Parallel;
    expect("{");
    while (!is("}")) par.children.push_back(system_item());
    expect("}");
    if (accept("restrict")) {
      SystemNode res;
      res.kind = SystemNode::Kind::Restrict;
      expect("{");
      if (!is("}")) {
        do res.channels.push_back(declared_channel());
        while (accept(","));
      }
      expect("}");
      res.children.push_back(std::move(par));
      return res;
    }
    return par;
  }

  SystemNode system_item() {
    if (accept("group")) {
      auto n = system_block();
      accept(";");
      return n;
    }
    SystemNode n;
    if (accept("replicator")) {
      n.kind = SystemNode::Kind::SpeciesProc;
      n.species = species_ref();
      n.replicator = 0;
      if (accept(".")) {
        const Token& t = peek();
        auto c = m_.find_channel(expect_ident("a rep channel"));
        const auto& reps = m_.species[n.species.value].replicators;
        auto it = std::find_if(reps.begin(), reps.end(), [&](const Replicator& r) { return r.channel == c; });
        if (!c.valid() || it == reps.end()) fail(t, "species has no replicator on that channel");
        n.replicator = static_cast<int>(it - reps.begin());
      } else if (m_.species[n.species.value].replicators.empty()) {
        fail(peek(), "species " + m_.species[n.species.value].name + " has no replicator");
      }
      expect(";");
      return n;
    }
    n.kind = SystemNode::Kind::Located;
    if (peek().kind == Token::Kind::Number) {
      n.multiplicity = expect_int("a multiplicity");
      if (n.multiplicity < 1) fail(peek(), "multiplicity must be at least 1");
      expect("of");
    }
    n.species = species_ref();
    expect(".");
    if (accept("(")) {
      n.term = parse_term(n.species);
      expect(")");
    } else {
      int c = constant_index(n.species);
      n.term = m_.terms.const_ref(n.species, c);
    }
    expect("at");
    n.location = location();
    expect(";");
    return n;
  }

  PatternSlot slot(bool is_loc) {
    PatternSlot s;
    if (accept("*")) {
      s.var = is_loc ? "*l" : "*s";
    } else if (peek().kind == Token::Kind::Var) {
      s.var = next().text;
    } else if (is_loc) {
      s.fixed = location().value;
    } else {
      s.fixed = species_ref().value;
    }
    return s;
  }

  LabelPattern label_pattern() {
    LabelPattern p;
    const Token& t = peek();
    auto head = expect_ident("an action label");
    if (head == "tick") {
      p.kind = ActionLabel::Kind::Tick;
      return p;
    }
    if (head == "in") p.kind = ActionLabel::Kind::In;
    else if (head == "out") p.kind = ActionLabel::Kind::Out;
    else if (head == "tau") p.kind = ActionLabel::Kind::Tau;
    else fail(t, "expected in, out, tau or tick");
    expect("(");
    if (is("go")) {
      if (p.kind != ActionLabel::Kind::Tau) fail(peek(), "go labels are internal: write tau(go, ...)");
      next();
      p.go = true;
    } else {
      p.channel = declared_channel();
    }
    expect(",");
    p.loc = slot(true);
    expect(",");
    p.species = slot(false);
    expect(")");
    return p;
  }

  void parse_policy() {
    policy_span_ = peek().span;
    next();
    expect("{");
    while (!is("}")) {
      PolicyPattern pp;
      pp.lower = label_pattern();
      expect("<");
      pp.higher = label_pattern();
      expect(";");
      patterns_.push_back(pp);
    }
    expect("}");
  }

  void parse_rewards() {
    next();
    RewardDef r;
    const Token& nt = peek();
    r.name = expect_ident("a reward name");
    if (m_.find_reward(r.name)) fail(nt, "reward " + r.name + " declared twice");
    expect("{");
    while (!is("}")) {
      const Token& t = peek();
      auto kw = expect_ident("'action' or 'state'");
      if (kw == "action") {
        auto p = label_pattern();
        expect(":");
        auto v = const_value();
        if (v < Rational(0)) fail(t, "rewards must be nonnegative");
        r.actions.push_back({p, v});
      } else if (kw == "state") {
        auto pred = parse_bool(false);
        expect(":");
        r.states.push_back({pred, parse_arith(false)});
      } else {
        fail(t, "expected 'action' or 'state'");
      }
      expect(";");
    }
    expect("}");
    m_.rewards.push_back(std::move(r));
  }

  // ---- terms ----
  Rational const_value() {
    const Token& t = peek();
    auto e = parse_arith(false);
    if (e.kind != ArithExpr::Kind::Const) fail(t, "expected a constant");
    return e.constant;
  }

  bool looks_like_probability() {
    auto save = pos_;
    bool ok = false;
    try {
      auto e = parse_arith(false);
      ok = e.kind == ArithExpr::Kind::Const && is(":");
    } catch (const SyntaxError&) {
      ok = false;
    }
    pos_ = save;
    return ok;
  }

  TermId parse_term(SpeciesId s) {
    if (!looks_like_probability()) return parse_sum(s);
    const Token& start = peek();
    TermNode n;
    n.kind = TermKind::PSum;
    Rational sum(0);
    do {
      const Token& pt = peek();
      auto p = const_value();
      if (p <= Rational(0) || p > Rational(1)) fail(pt, "probability " + to_string(p) + " outside (0,1]");
      sum += p;
      expect(":");
      n.branches.push_back({p, parse_sum(s)});
    } while (accept("(+)"));
    if (sum != Rational(1)) fail(start, "probabilities sum to " + to_string(sum) + ", not 1");
    return m_.terms.intern(n);
  }

  TermId parse_sum(SpeciesId s) {
    const Token& first_tok = peek();
    TermId first = parse_prim(s);
    if (!is("+")) return first;
    TermNode n;
    n.kind = TermKind::NSum;
    auto add = [&](TermId t, const Token& at) {
      const auto& node = m_.terms.at(t);
      if (node.kind != TermKind::NSum) fail(at, "summands of '+' must start with an action prefix");
      for (const auto& a : node.actions) n.actions.push_back(a);
    };
    add(first, first_tok);
    while (accept("+")) {
      const Token& t = peek();
      add(parse_prim(s), t);
    }
    return m_.terms.intern(n);
  }

  TermId parse_prim(SpeciesId s) {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      if (t.text != "0") fail(t, "expected a process; only 0 is a numeric process");
      next();
      return m_.terms.nil();
    }
    if (accept("(")) {
      auto r = parse_term(s);
      expect(")");
      return r;
    }
    if (t.kind != Token::Kind::Ident) fail(t, "expected a process");
    if (t.text == "tick" && is(".", 1)) {
      next();
      next();
      return m_.terms.prefix(Prefix::tick(), parse_prim(s));
    }
    if (t.text == "go" && (peek(1).kind == Token::Kind::Ident || peek(1).kind == Token::Kind::Number) && is(".", 2)) {
      next();
      auto l = location();
      expect(".");
      return m_.terms.prefix(Prefix::go(l), parse_prim(s));
    }
    if (t.text == "disperse" && is("uniform", 1)) {
      next();
      next();
      expect("nb");
      expect("(");
      expect("myloc");
      expect(")");
      expect("then");
      TermNode n;
      n.kind = TermKind::GoUniform;
      n.cont = parse_prim(s);
      return m_.terms.intern(n);
    }
    if (t.text == "cond" && is("(", 1)) {
      next();
      next();
      TermNode n;
      n.kind = TermKind::Cond;
      do {
        auto g = parse_bool(true);
        expect("->");
        n.guards.push_back({g, parse_term(s)});
      } while (accept(";") && !is(")"));
      expect(")");
      return m_.terms.intern(n);
    }
    if (is("?", 1) || is("!", 1)) {
      bool input = is("?", 1);
      auto c = m_.channel(next().text);
      next();
      expect(".");
      auto cont = parse_prim(s);
      return m_.terms.prefix(input ? Prefix::in(c) : Prefix::out(c), cont);
    }
    next();
    int c = m_.species[s.value].find_constant(t.text);
    if (c < 0) fail(t, "undefined process '" + t.text + "' in species " + m_.species[s.value].name);
    return m_.terms.const_ref(s, c);
  }

  // ---- expressions ----
  static ArithExpr fold(ArithExpr e) {
    bool all_const = !e.args.empty();
    for (const auto& a : e.args)
      if (a.kind != ArithExpr::Kind::Const) all_const = false;
    if (!all_const) return e;
    Value v = e.args.size() == 1 ? apply_unary(e.kind, Value::of(e.args[0].constant))
                                 : apply_binary(e.kind, Value::of(e.args[0].constant), Value::of(e.args[1].constant));
    return ArithExpr::number(v.q);
  }

  ArithExpr make_binary(ArithExpr::Kind k, ArithExpr a, ArithExpr b, const Token& at) {
    try {
      return fold(ArithExpr::binary(k, std::move(a), std::move(b)));
    } catch (const EvalError& e) {
      fail(at, e.what());
    }
  }

  ArithExpr parse_arith(bool allow_myloc) {
    auto e = arith_term(allow_myloc);
    while (is("+") || is("-")) {
      const Token& t = next();
      auto k = t.text == "+" ? ArithExpr::Kind::Add : ArithExpr::Kind::Sub;
      e = make_binary(k, std::move(e), arith_term(allow_myloc), t);
    }
    return e;
  }

  ArithExpr arith_term(bool allow_myloc) {
    auto e = arith_unary(allow_myloc);
    while (is("*") || is("/")) {
      const Token& t = next();
      auto k = t.text == "*" ? ArithExpr::Kind::Mul : ArithExpr::Kind::Div;
      e = make_binary(k, std::move(e), arith_unary(allow_myloc), t);
    }
    return e;
  }

  ArithExpr arith_unary(bool allow_myloc) {
    if (accept("-")) return fold(ArithExpr::unary(ArithExpr::Kind::Neg, arith_unary(allow_myloc)));
    return arith_primary(allow_myloc);
  }

  LocRef loc_ref(bool allow_myloc) {
    if (is("myloc")) {
      if (!allow_myloc) fail(peek(), "myloc is only meaningful inside a process");
      next();
      return LocRef::here();
    }
    return LocRef::at(location());
  }

  ArithExpr sum_over_locations(const std::function<ArithExpr(LocationId)>& f) {
    ArithExpr e = f(LocationId{0});
    for (int l = 1; l < m_.habitat.size(); ++l) e = ArithExpr::binary(ArithExpr::Kind::Add, e, f(LocationId{l}));
    return e;
  }

  ArithExpr arith_primary(bool allow_myloc) {
    const Token& t = peek();
    if (t.kind == Token::Kind::Number) {
      next();
      try {
        return ArithExpr::number(parse_rational(t.text));
      } catch (const std::exception&) {
        fail(t, "bad number");
      }
    }
    if (accept("(")) {
      auto e = parse_arith(allow_myloc);
      expect(")");
      return e;
    }
    if (accept("@")) return ArithExpr::total(loc_ref(allow_myloc));
    if (t.kind != Token::Kind::Ident) fail(t, "expected an arithmetic expression");
    if ((t.text == "abs" || t.text == "min" || t.text == "max") && is("(", 1)) {
      next();
      next();
      auto a = parse_arith(allow_myloc);
      if (t.text == "abs") {
        expect(")");
        return fold(ArithExpr::unary(ArithExpr::Kind::Abs, std::move(a)));
      }
      expect(",");
      auto b = parse_arith(allow_myloc);
      expect(")");
      return make_binary(t.text == "min" ? ArithExpr::Kind::Min : ArithExpr::Kind::Max, std::move(a), std::move(b), t);
    }
    if (t.text == "count" && is("(", 1)) {
      next();
      next();
      auto s = species_ref();
      expect(")");
      if (m_.habitat.size() == 0) fail(t, "no locations declared");
      return sum_over_locations([&](LocationId l) { return ArithExpr::count(s, LocRef::at(l)); });
    }
    if (t.text == "pop" && !is("@", 1)) {
      next();
      if (m_.habitat.size() == 0) fail(t, "no locations declared");
      return sum_over_locations([](LocationId l) { return ArithExpr::total(LocRef::at(l)); });
    }
    if (!is("@", 1)) fail(t, "expected NAME@LOCATION, @LOCATION or a number");
    next();
    next();
    if (auto s = m_.find_species(t.text); s.valid()) return ArithExpr::count(s, loc_ref(allow_myloc));
    if (int a = m_.attributes.find(t.text); a >= 0) return ArithExpr::attr(a, loc_ref(allow_myloc));
    fail(t, "unknown species or attribute '" + t.text + "'");
  }

  BoolExpr parse_bool(bool allow_myloc) {
    auto e = bool_and(allow_myloc);
    while (accept("|")) {
      auto r = bool_and(allow_myloc);
      e = BoolExpr::negate(BoolExpr::conj(BoolExpr::negate(std::move(e)), BoolExpr::negate(std::move(r))));
    }
    return e;
  }

  BoolExpr bool_and(bool allow_myloc) {
    auto e = bool_not(allow_myloc);
    while (accept("&")) e = BoolExpr::conj(std::move(e), bool_not(allow_myloc));
    return e;
  }

  BoolExpr bool_not(bool allow_myloc) {
    if (accept("!")) return BoolExpr::negate(bool_not(allow_myloc));
    if (accept("true")) return BoolExpr::truth();
    if (accept("false")) return BoolExpr::negate(BoolExpr::truth());
    if (is("(")) {
      auto save = pos_;
      try {
        return comparison(allow_myloc);
      } catch (const SyntaxError&) {
        pos_ = save;
      }
      next();
      auto e = parse_bool(allow_myloc);
      expect(")");
      return e;
    }
    return comparison(allow_myloc);
  }

  BoolExpr comparison(bool allow_myloc) {
    auto lhs = parse_arith(allow_myloc);
    const Token& t = peek();
    static const std::vector<std::string> ops{"=", "<=", ">=", "<", ">", "!="};
    if (t.kind != Token::Kind::Punct || std::find(ops.begin(), ops.end(), t.text) == ops.end())
      fail(t, "expected a comparison operator");
    std::string op = next().text;
    auto rhs = parse_arith(allow_myloc);
    // Normalise to `w op c` with a constant right-hand side.
    bool flip = false;
    if (rhs.kind != ArithExpr::Kind::Const) {
      if (lhs.kind == ArithExpr::Kind::Const) {
        std::swap(lhs, rhs);
        flip = true;
      } else {
        lhs = ArithExpr::binary(ArithExpr::Kind::Sub, std::move(lhs), std::move(rhs));
        rhs = ArithExpr::number(0);
      }
    }
    if (flip) {
      if (op == "<=") op = ">=";
      else if (op == ">=") op = "<=";
      else if (op == "<") op = ">";
      else if (op == ">") op = "<";
    }
    Rational c = rhs.constant;
    if (op == "=") return BoolExpr::compare(lhs, CmpOp::Eq, c);
    if (op == "<=") return BoolExpr::compare(lhs, CmpOp::Le, c);
    if (op == ">=") return BoolExpr::compare(lhs, CmpOp::Ge, c);
    if (op == "<") return BoolExpr::negate(BoolExpr::compare(lhs, CmpOp::Ge, c));
    if (op == ">") return BoolExpr::negate(BoolExpr::compare(lhs, CmpOp::Le, c));
    return BoolExpr::negate(BoolExpr::compare(lhs, CmpOp::Eq, c));
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  Model& m_;
  std::vector<PolicyPattern> patterns_;
  SourceSpan policy_span_;
};

}  // namespace

Model parse_model(const std::string& text) {
  Model m;
  Parser p(detail::lex(text), m);
  p.parse_file();
  finalize_model(m);
  return m;
}

BoolExpr parse_predicate(const Model& m, const std::string& text) {
  Model copy = m;
  Parser p(detail::lex(text), copy);
  return p.whole_bool();
}

ArithExpr parse_arith(const Model& m, const std::string& text) {
  Model copy = m;
  Parser p(detail::lex(text), copy);
  return p.whole_arith();
}

}  // namespace palps
