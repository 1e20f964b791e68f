#include "palps/gc_interp.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace palps::gc {

int GcModel::find_var(const std::string& name) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == name) return static_cast<int>(i);
  return -1;
}

namespace {

struct Tok {
  enum Kind { Ident, Number, String, Punct, End } kind = End;
  std::string text;
  int line = 0;
};

std::vector<Tok> tokenize(const std::string& s) {
  std::vector<Tok> out;
  int line = 1;
  std::size_t i = 0;
  static const char* const multi[] = {"..", "->", "<=", ">=", "!="};
  while (i < s.size()) {
    char c = s[i];
    if (c == '\n') {
      ++line;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '/' && i + 1 < s.size() && s[i + 1] == '/') {
      while (i < s.size() && s[i] != '\n') ++i;
      continue;
    }
    std::size_t b = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::Ident, s.substr(b, i - b), line});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i + 1 < s.size() && s[i] == '.' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '-' || s[j] == '+')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({Tok::Number, s.substr(b, i - b), line});
      continue;
    }
    if (c == '"') {
      ++i;
      while (i < s.size() && s[i] != '"') ++i;
      if (i >= s.size()) throw GcError("line " + std::to_string(line) + ": unterminated string");
      out.push_back({Tok::String, s.substr(b + 1, i - b - 1), line});
      ++i;
      continue;
    }
    bool matched = false;
    for (const char* m : multi) {
      std::string t(m);
      if (s.compare(i, t.size(), t) == 0) {
        out.push_back({Tok::Punct, t, line});
        i += t.size();
        matched = true;
        break;
      }
    }
    if (matched) continue;
    static const std::string singles = "[]();:,='&|!+-*/?<>{}";
    if (singles.find(c) == std::string::npos)
      throw GcError("line " + std::to_string(line) + ": unexpected character '" + std::string(1, c) + "'");
    out.push_back({Tok::Punct, std::string(1, c), line});
    ++i;
  }
  out.push_back({Tok::End, "", line});
  return out;
}

// Exact value of a decimal literal such as 0.25 or 1e-3.
Rational decimal(const std::string& text) {
  auto e = text.find_first_of("eE");
  std::string mant = text.substr(0, e);
  int exp = e == std::string::npos ? 0 : std::stoi(text.substr(e + 1));
  auto dot = mant.find('.');
  std::string digits = mant;
  if (dot != std::string::npos) {
    digits = mant.substr(0, dot) + mant.substr(dot + 1);
    exp -= static_cast<int>(mant.size() - dot - 1);
  }
  Rational v(std::stoll(digits));
  Rational ten(10);
  for (; exp > 0; --exp) v *= ten;
  for (; exp < 0; ++exp) v /= ten;
  return v;
}

class Parser {
 public:
  explicit Parser(const std::string& text) : toks_(tokenize(text)) {}

  GcModel run() {
    prescan();
    expect_ident("mdp");
    while (peek().kind != Tok::End) item();
    check_labels();
    return std::move(g_);
  }

 private:
  std::vector<Tok> toks_;
  std::size_t pos_ = 0;
  GcModel g_;
  std::map<std::string, int> formula_index_;
  std::set<std::string> constant_names_;
  int current_module_ = -1;

  const Tok& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  const Tok& next() {
    const Tok& t = peek();
    if (pos_ + 1 < toks_.size()) ++pos_;
    return t;
  }
  bool is(const std::string& s, std::size_t k = 0) const {
    return peek(k).kind != Tok::String && peek(k).kind != Tok::End && peek(k).text == s;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw GcError("line " + std::to_string(peek().line) + ": " + msg + " near '" + peek().text + "'");
  }
  void expect(const std::string& s) {
    if (!is(s)) fail("expected '" + s + "'");
    next();
  }
  void expect_ident(const std::string& s) { expect(s); }
  std::string name() {
    if (peek().kind != Tok::Ident) fail("expected a name");
    return next().text;
  }
  void diag(int line, const std::string& msg) { g_.diagnostics.push_back({line, msg}); }

  // Collects variable and formula names so that declarations may follow use.
  void prescan() {
    int module = -1;
    int modules = 0;
    for (std::size_t i = 0; i + 1 < toks_.size(); ++i) {
      const auto& t = toks_[i];
      if (t.kind != Tok::Ident) continue;
      if (t.text == "module" && toks_[i + 1].kind == Tok::Ident) {
        module = modules++;
        ++i;
      } else if (t.text == "endmodule") {
        module = -1;
      } else if (t.text == "global" && toks_[i + 1].kind == Tok::Ident) {
        add_var(toks_[i + 1], -1);
        ++i;
      } else if (t.text == "formula" && toks_[i + 1].kind == Tok::Ident) {
        formula_index_[toks_[i + 1].text] = static_cast<int>(g_.formulas.size());
        g_.formulas.push_back({toks_[i + 1].text, nullptr});
        ++i;
      } else if (module >= 0 && i + 2 < toks_.size() && toks_[i + 1].text == ":" && toks_[i + 2].text == "[" &&
                 (i == 0 || toks_[i - 1].text == ";" || toks_[i - 1].kind == Tok::Ident)) {
        add_var(t, module);
      }
    }
  }

  void add_var(const Tok& t, int module) {
    if (g_.find_var(t.text) >= 0) {
      diag(t.line, "variable " + t.text + " declared twice");
      return;
    }
    g_.vars.push_back({t.text, 0, 0, 0, module});
  }

  void item() {
    const Tok& t = peek();
    if (is("const")) {
      next();
      if (is("double") || is("int") || is("bool")) next();
      auto n = name();
      expect("=");
      auto e = expr();
      expect(";");
      if (constant_names_.count(n)) diag(t.line, "constant " + n + " declared twice");
      constant_names_.insert(n);
      g_.constants.push_back({n, eval_static(e, t.line)});
    } else if (is("global")) {
      next();
      declare_var();
    } else if (is("formula")) {
      next();
      auto n = name();
      expect("=");
      auto e = expr();
      expect(";");
      g_.formulas[formula_index_.at(n)].second = e;
    } else if (is("module")) {
      module();
    } else if (is("label")) {
      next();
      if (peek().kind != Tok::String) fail("expected a label name");
      auto n = next().text;
      expect("=");
      auto e = expr();
      expect(";");
      g_.labels[n] = e;
    } else if (is("rewards")) {
      next();
      if (peek().kind != Tok::String) fail("expected a reward name");
      g_.reward_names.push_back(next().text);
      while (!is("endrewards")) {
        if (peek().kind == Tok::End) fail("missing endrewards");
        if (is("[")) {
          next();
          if (!is("]")) name();
          expect("]");
        }
        expr();
        expect(":");
        expr();
        expect(";");
      }
      next();
    } else {
      fail("unexpected token");
    }
  }

  void declare_var() {
    const Tok& t = peek();
    auto n = name();
    expect(":");
    expect("[");
    auto lo = expr();
    expect("..");
    auto hi = expr();
    expect("]");
    int idx = g_.find_var(n);
    auto& v = g_.vars.at(idx);
    v.lo = int_of(eval_static(lo, t.line), t.line);
    v.hi = int_of(eval_static(hi, t.line), t.line);
    v.init = v.lo;
    if (is("init")) {
      next();
      v.init = int_of(eval_static(expr(), t.line), t.line);
    }
    expect(";");
    if (v.lo > v.hi || v.init < v.lo || v.init > v.hi) diag(t.line, "bad range or initial value for " + n);
  }

  void module() {
    expect("module");
    Module md;
    md.name = name();
    current_module_ = static_cast<int>(g_.modules.size());
    g_.modules.push_back(md);
    while (!is("endmodule")) {
      if (peek().kind == Tok::End) fail("missing endmodule");
      if (is("[")) {
        command();
      } else {
        declare_var();
      }
    }
    next();
    auto& m = g_.modules.back();
    std::set<std::string> alpha;
    for (const auto& c : m.commands)
      if (!c.label.empty()) alpha.insert(c.label);
    m.alphabet.assign(alpha.begin(), alpha.end());
    current_module_ = -1;
  }

  void command() {
    Command c;
    c.line = peek().line;
    expect("[");
    if (!is("]")) c.label = name();
    expect("]");
    c.guard = expr();
    expect("->");
    if (is("true") && is(";", 1)) {
      next();
      c.branches.push_back({num(Rational(1)), {}});
    } else {
      while (true) {
        Branch b;
        if (is("(") && peek(1).kind == Tok::Ident && is("'", 2)) {
          b.prob = num(Rational(1));
        } else {
          b.prob = expr();
          expect(":");
        }
        if (is("true")) {
          next();
        } else {
          while (true) {
            expect("(");
            const Tok& vt = peek();
            auto v = name();
            expect("'");
            expect("=");
            Assignment a;
            a.var = g_.find_var(v);
            a.value = expr();
            expect(")");
            if (a.var < 0) {
              diag(vt.line, "assignment to unknown variable " + v);
            } else {
              const auto& var = g_.vars[a.var];
              if (var.module >= 0 && var.module != current_module_)
                diag(vt.line, "module " + g_.modules[current_module_].name + " writes variable " + v + " of another module");
              if (var.module < 0 && !c.label.empty())
                diag(vt.line, "global variable " + v + " written in synchronised command [" + c.label + "]");
              b.assignments.push_back(a);
            }
            if (!is("&")) break;
            next();
          }
        }
        c.branches.push_back(std::move(b));
        if (!is("+")) break;
        next();
      }
    }
    expect(";");
    g_.modules.back().commands.push_back(std::move(c));
  }

  void check_labels() {
    if (!g_.labels.count("stable")) diag(0, "missing label \"stable\"");
    for (std::size_t i = 0; i < g_.formulas.size(); ++i)
      if (!g_.formulas[i].second) diag(0, "formula " + g_.formulas[i].first + " has no definition");
  }

  // ---- expressions ----
  static ExprPtr num(Rational q) {
    auto e = std::make_shared<Expr>();
    e->kind = Expr::Kind::Num;
    e->num = q;
    return e;
  }
  static ExprPtr node(Expr::Kind k, std::string op, std::vector<ExprPtr> args) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->op = std::move(op);
    e->args = std::move(args);
    return e;
  }

  ExprPtr expr() {
    auto c = disjunction();
    if (is("?")) {
      next();
      auto a = expr();
      expect(":");
      auto b = expr();
      return node(Expr::Kind::Ite, "", {c, a, b});
    }
    return c;
  }
  ExprPtr disjunction() {
    auto l = conjunction();
    while (is("|")) {
      next();
      l = node(Expr::Kind::Bin, "|", {l, conjunction()});
    }
    return l;
  }
  ExprPtr conjunction() {
    auto l = negation();
    while (is("&")) {
      next();
      l = node(Expr::Kind::Bin, "&", {l, negation()});
    }
    return l;
  }
  ExprPtr negation() {
    if (is("!")) {
      next();
      return node(Expr::Kind::Not, "", {negation()});
    }
    return relation();
  }
  ExprPtr relation() {
    auto l = additive();
    static const std::set<std::string> rel{"=", "!=", "<", "<=", ">", ">="};
    if (peek().kind == Tok::Punct && rel.count(peek().text)) {
      auto op = next().text;
      return node(Expr::Kind::Bin, op, {l, additive()});
    }
    return l;
  }
  ExprPtr additive() {
    auto l = multiplicative();
    while (is("+") || is("-")) {
      // A '+' between probabilistic branches is not arithmetic.
      if (is("+") && is("(", 1) && peek(2).kind == Tok::Ident && is("'", 3)) break;
      auto op = next().text;
      l = node(Expr::Kind::Bin, op, {l, multiplicative()});
    }
    return l;
  }
  ExprPtr multiplicative() {
    auto l = unary();
    while (is("*") || is("/")) {
      auto op = next().text;
      l = node(Expr::Kind::Bin, op, {l, unary()});
    }
    return l;
  }
  ExprPtr unary() {
    if (is("-")) {
      next();
      return node(Expr::Kind::Neg, "", {unary()});
    }
    return primary();
  }
  ExprPtr primary() {
    const Tok& t = peek();
    if (t.kind == Tok::Number) {
      next();
      return num(decimal(t.text));
    }
    if (is("(")) {
      next();
      auto e = expr();
      expect(")");
      return e;
    }
    if (t.kind != Tok::Ident) fail("expected an expression");
    next();
    if (t.text == "true" || t.text == "false") {
      auto e = std::make_shared<Expr>();
      e->kind = Expr::Kind::Bool;
      e->flag = t.text == "true";
      return e;
    }
    if ((t.text == "min" || t.text == "max") && is("(")) {
      next();
      std::vector<ExprPtr> args{expr()};
      while (is(",")) {
        next();
        args.push_back(expr());
      }
      expect(")");
      return node(Expr::Kind::Call, t.text, args);
    }
    auto e = std::make_shared<Expr>();
    if (int v = g_.find_var(t.text); v >= 0) {
      e->kind = Expr::Kind::Var;
      e->index = v;
    } else if (auto f = formula_index_.find(t.text); f != formula_index_.end()) {
      e->kind = Expr::Kind::Formula;
      e->index = f->second;
    } else {
      auto it = std::find_if(g_.constants.begin(), g_.constants.end(), [&](const auto& c) { return c.first == t.text; });
      if (it == g_.constants.end()) {
        diag(t.line, "unknown identifier " + t.text);
        return num(Rational(0));
      }
      e->kind = Expr::Kind::Const;
      e->index = static_cast<int>(it - g_.constants.begin());
    }
    return e;
  }

  Value eval_static(const ExprPtr& e, int line) {
    try {
      State none(g_.vars.size(), 0);
      return evaluate(g_, *e, none);
    } catch (const GcError& err) {
      diag(line, err.what());
      return Value{};
    }
  }
  std::int64_t int_of(const Value& v, int line) {
    if (v.is_bool || v.q.denominator() != 1) {
      diag(line, "expected an integer");
      return 0;
    }
    return v.q.numerator();
  }
};

}  // namespace

GcModel parse(const std::string& text) { return Parser(text).run(); }

}  // namespace palps::gc
