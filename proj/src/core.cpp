#include "palps/core.hpp"

#include <cctype>
#include <limits>

namespace palps {

double to_double(const Rational& r) {
  return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

std::string to_string(const Rational& r) {
  if (r.denominator() == 1) return std::to_string(r.numerator());
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

namespace {

std::int64_t parse_int(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("empty number");
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) throw std::invalid_argument("bad number '" + s + "'");
  if (s.size() > 18) throw std::invalid_argument("number too long '" + s + "'");
  return std::stoll(s);
}

}  // namespace

Rational parse_rational(const std::string& text) {
  std::string s = text;
  bool negative = false;
  if (!s.empty() && (s[0] == '-' || s[0] == '+')) {
    negative = s[0] == '-';
    s = s.substr(1);
  }
  Rational r;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    auto den = parse_int(s.substr(slash + 1));
    if (den == 0) throw std::invalid_argument("zero denominator");
    r = Rational(parse_int(s.substr(0, slash)), den);
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string whole = s.substr(0, dot);
    std::string frac = s.substr(dot + 1);
    if (whole.empty() && frac.empty()) throw std::invalid_argument("bad number '" + text + "'");
    if (frac.size() > 17) throw std::invalid_argument("too many decimals '" + text + "'");
    std::int64_t den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    r = Rational(whole.empty() ? 0 : parse_int(whole)) + (frac.empty() ? Rational(0) : Rational(parse_int(frac), den));
  } else {
    r = Rational(parse_int(s));
  }
  return negative ? -r : r;
}

}  // namespace palps
