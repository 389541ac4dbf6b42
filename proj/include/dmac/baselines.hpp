#pragma once

#include "dmac/curve.hpp"
#include "dmac/dist.hpp"

#include <utility>

namespace dmac {

// Sum constraint tight at a successive-decoding corner: the user with the
// smaller gain sits at its single-user floor; equal gains put user 2 there.
std::pair<double, double> centralized_power(double b1, double b2, double alpha1, double alpha2);
double centralized_average(const RateFadingLaw& law1, const RateFadingLaw& law2);

// share * (2^{2b/share} - 1) / alpha
PowerCurve stdm_curve(double alpha, double share = 0.5);
// E[tau (2^{2B1/tau} - 1)/H1] + E[(1 - tau)(2^{2B2/(1-tau)} - 1)/H2]
double tdm_average(const RateFadingLaw& law1, const RateFadingLaw& law2, double tau);

struct GtdmResult {
  double tau;
  double average;
};

// Golden-section search over tau in (1e-9, 1 - 1e-9).
GtdmResult gtdm_optimize(const RateFadingLaw& law1, const RateFadingLaw& law2);

}  // namespace dmac
