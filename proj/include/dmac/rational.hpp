#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <string>
#include <string_view>

namespace dmac {

using Rational = boost::multiprecision::mpq_rational;

// Tolerance used when a real-valued input is converted to a rational.
inline constexpr double kSnapTolerance = 1e-12;

double to_double(const Rational& q);

// Simplest rational (smallest denominator) within tol of x.
Rational snap(double x, double tol = kSnapTolerance);

// Accepts "p/q", "p", or a plain decimal such as "0.125"; exact.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);

Rational floor(const Rational& q);

}  // namespace dmac
