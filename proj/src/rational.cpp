#include "dmac/rational.hpp"

#include <cmath>
#include <stdexcept>

namespace dmac {

using boost::multiprecision::mpz_int;

double to_double(const Rational& q) { return q.convert_to<double>(); }

Rational floor(const Rational& q) {
  mpz_int n = numerator(q), d = denominator(q);
  mpz_int f = n / d;  // truncates toward zero
  if (n < 0 && f * d != n) f -= 1;
  return Rational(f);
}

namespace {

// Simplest rational in [lo, hi], 0 < lo <= hi.
Rational simplest_between(const Rational& lo, const Rational& hi) {
  Rational fl = floor(lo);
  if (fl == lo) return fl;
  if (fl + 1 <= hi) return fl + 1;
  Rational inner = simplest_between(1 / (hi - fl), 1 / (lo - fl));
  return fl + 1 / inner;
}

}  // namespace

Rational snap(double x, double tol) {
  if (!std::isfinite(x)) throw std::invalid_argument("cannot snap a non-finite value to a rational");
  Rational exact(x);
  Rational t(tol);
  bool neg = exact < 0;
  if (neg) exact = -exact;
  Rational lo = exact - t, hi = exact + t;
  Rational r = lo <= 0 ? Rational(0) : simplest_between(lo, hi);
  return neg ? Rational(-r) : r;
}

namespace {

// mpz_int picks the base from the prefix, so "0125" would read as octal.
mpz_int decimal_integer(std::string digits) {
  bool neg = false;
  if (!digits.empty() && (digits[0] == '+' || digits[0] == '-')) {
    neg = digits[0] == '-';
    digits.erase(0, 1);
  }
  if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
    throw std::domain_error("bad digits");
  std::size_t nz = digits.find_first_not_of('0');
  mpz_int v(nz == std::string::npos ? std::string("0") : digits.substr(nz));
  return neg ? mpz_int(-v) : v;
}

}  // namespace

Rational parse_rational(std::string_view text) {
  std::string s(text);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  s = s.substr(b);
  if (s.empty()) throw std::invalid_argument("empty rational literal");
  try {
    if (auto slash = s.find('/'); slash != std::string::npos) {
      mpz_int n = decimal_integer(s.substr(0, slash)), d = decimal_integer(s.substr(slash + 1));
      if (d == 0) throw std::invalid_argument("zero denominator");
      return Rational(n, d);
    }
    if (s.find_first_of("eE") != std::string::npos) return snap(std::stod(s));
    if (auto dot = s.find('.'); dot != std::string::npos) {
      std::string digits = s.substr(0, dot) + s.substr(dot + 1);
      mpz_int scale = 1;
      for (size_t i = dot + 1; i < s.size(); ++i) scale *= 10;
      return Rational(decimal_integer(digits), scale);
    }
    return Rational(decimal_integer(s));
  } catch (const std::invalid_argument&) {
    throw;
  } catch (const std::exception&) {
    throw std::invalid_argument("malformed rational literal '" + std::string(text) + "'");
  }
}

std::string to_string(const Rational& q) { return q.str(); }

}  // namespace dmac
