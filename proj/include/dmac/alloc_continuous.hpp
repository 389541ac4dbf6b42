#pragma once

#include "dmac/dist.hpp"

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace dmac {

// Continuous rate law given by its CDF on [b_min, b_max].
struct ContinuousLawSpec {
  std::function<double(double)> cdf;  // nondecreasing, right-continuous
  double b_min = 0.0;
  double b_max = 1.0;
  std::size_t n_grid = 1025;  // quantile grid points, at least 64

  static ContinuousLawSpec point_mass(double b, std::size_t n_grid = 1025);
  static ContinuousLawSpec uniform(double lo, double hi, std::size_t n_grid = 1025);
  // Each atom spread as a uniform ramp of the given width (clipped at 0).
  static ContinuousLawSpec smoothed(const DiscreteLaw& law, double width, std::size_t n_grid = 1025);

  // Throws std::invalid_argument naming the violated condition.
  void validate() const;
  // inf{b : cdf(b) >= x} for x > 0 and inf{b : cdf(b) > 0} at x = 0, by
  // bisection to 1e-10.
  double quantile(double x) const;
};

struct ContinuousSample {
  double quantile;
  double rate_1, power_1;
  double rate_2, power_2;
};

struct ContinuousAllocation {
  double alpha = 1.0;
  std::vector<ContinuousSample> samples;
  double average = 0.0;   // E P_1(B_1) + E P_2(B_2)
  double residual = 0.0;  // max relative violation of the per-sample sum equality
};

// User 1 has gain 1 and user 2 gain alpha in (0, 1]. User 2 starts at its
// single-user floor; powers grow along the joint quantile path.
ContinuousAllocation allocate_continuous(const ContinuousLawSpec& spec1, const ContinuousLawSpec& spec2,
                                         double alpha);

// Floors, monotonicity and convexity of both sampled curves.
bool check_continuous(const ContinuousAllocation& a, double tol = 1e-9, std::string* why = nullptr);

}  // namespace dmac
