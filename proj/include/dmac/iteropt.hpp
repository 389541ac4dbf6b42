#pragma once

#include "dmac/alloc_unit.hpp"
#include "dmac/curve.hpp"
#include "dmac/mdp.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace dmac {

// Time-sharing interpolation of `user`'s assigned powers at the given fading
// gain, continued above the top rate by zero-mass dummy rates spaced `step`
// apart up to r_max, with the other users held at their top pairs.
RatePowerCurve rate_power_curve(const AllocationReport& report, std::size_t user, double r_max, double step = 1.0,
                                std::optional<Rational> gain = std::nullopt);
TabulatedFadingCurve fading_power_curve(const AllocationReport& report, std::size_t user, double r_max,
                                        double step = 1.0);

enum class IterInit { unitdelay, tdma };

struct IterOptConfig {
  VIConfig vi;
  double halt_tol = 1e-6;
  std::size_t max_outer = 50;
  IterInit init = IterInit::unitdelay;
};

struct IterOptStep {
  std::vector<SchedulerPolicy> schedulers;
  std::vector<DiscreteLaw> laws;
  AllocationReport allocation;
  double average = 0.0;
};

struct IterOptTrace {
  std::size_t dmax = 1;
  std::array<Rational, 2> gains;
  std::vector<DiscreteLaw> arrivals;
  std::vector<IterOptStep> steps;
  std::string halt_reason;

  const IterOptStep& final_step() const { return steps.back(); }
  // Refinement rounds after the initial allocation.
  std::size_t iterations() const { return steps.empty() ? 0 : steps.size() - 1; }
};

IterOptTrace iteropt(const std::vector<DiscreteLaw>& arrivals, const std::array<Rational, 2>& gains, std::size_t dmax,
                     const IterOptConfig& cfg = {});

// One refinement round: curves from the incumbent allocation, per-user VIA,
// marginals. A user keeps its incumbent scheduler when the new one has a
// higher average cost under the same curve.
IterOptStep iteropt_round(const IterOptStep& incumbent, const std::vector<DiscreteLaw>& arrivals,
                          const std::array<Rational, 2>& gains, std::size_t dmax, const VIConfig& vi);

}  // namespace dmac
