#include "dmac/baselines.hpp"

#include "dmac/alloc_unit.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace dmac {

std::pair<double, double> centralized_power(double b1, double b2, double alpha1, double alpha2) {
  if (!(alpha1 > 0 && alpha2 > 0)) throw std::invalid_argument("channel gains must be positive");
  double total = rate_cost(b1 + b2);
  if (alpha1 < alpha2) {
    double r1 = rate_cost(b1);
    return {r1 / alpha1, (total - r1) / alpha2};
  }
  double r2 = rate_cost(b2);
  return {(total - r2) / alpha1, r2 / alpha2};
}

double centralized_average(const RateFadingLaw& law1, const RateFadingLaw& law2) {
  double acc = 0.0;
  for (const auto& b1 : law1.rate.atoms())
    for (const auto& h1 : law1.fading.atoms())
      for (const auto& b2 : law2.rate.atoms())
        for (const auto& h2 : law2.fading.atoms()) {
          Rational w = b1.prob * h1.prob * b2.prob * h2.prob;
          if (w == 0) continue;
          auto [p1, p2] = centralized_power(to_double(b1.value), to_double(b2.value), to_double(h1.value),
                                            to_double(h2.value));
          acc += to_double(w) * (p1 + p2);
        }
  return acc;
}

PowerCurve stdm_curve(double alpha, double share) {
  if (!(alpha > 0)) throw std::invalid_argument("channel gain must be positive");
  if (!(share > 0 && share <= 1)) throw std::invalid_argument("time share must lie in (0,1]");
  return [alpha, share](double b) { return share * std::expm1(2.0 * b / share * std::log(2.0)) / alpha; };
}

namespace {

double user_tdm(const RateFadingLaw& law, double share) {
  double acc = 0.0;
  for (const auto& b : law.rate.atoms())
    for (const auto& h : law.fading.atoms()) {
      Rational w = b.prob * h.prob;
      if (w == 0 || b.value == 0) continue;
      acc += to_double(w) * share * std::expm1(2.0 * to_double(b.value) / share * std::log(2.0)) / to_double(h.value);
    }
  return acc;
}

}  // namespace

double tdm_average(const RateFadingLaw& law1, const RateFadingLaw& law2, double tau) {
  if (!(tau > 0 && tau < 1)) throw std::invalid_argument("time fraction must lie in (0,1)");
  return user_tdm(law1, tau) + user_tdm(law2, 1 - tau);
}

GtdmResult gtdm_optimize(const RateFadingLaw& law1, const RateFadingLaw& law2) {
  constexpr double eps = 1e-9;
  const double g = (std::sqrt(5.0) - 1) / 2;
  double lo = eps, hi = 1 - eps;
  double a = hi - g * (hi - lo), b = lo + g * (hi - lo);
  double fa = tdm_average(law1, law2, a), fb = tdm_average(law1, law2, b);
  while (hi - lo > 1e-10) {
    if (fa <= fb) {
      hi = b;
      b = a;
      fb = fa;
      a = hi - g * (hi - lo);
      fa = tdm_average(law1, law2, a);
    } else {
      lo = a;
      a = b;
      fa = fb;
      b = lo + g * (hi - lo);
      fb = tdm_average(law1, law2, b);
    }
  }
  double tau = 0.5 * (lo + hi);
  return {tau, tdm_average(law1, law2, tau)};
}

}  // namespace dmac
