#pragma once

#include "dmac/alloc_unit.hpp"
#include "dmac/curve.hpp"
#include "dmac/mdp.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace dmac {

enum class SchedulerKind { identity, via, robust, dd };

SchedulerKind parse_scheduler(const std::string& name);
std::string to_string(SchedulerKind k);

struct SimUser {
  DiscreteLaw arrivals;
  DiscreteLaw fading = DiscreteLaw::point(1);  // power gains h^2
  SchedulerKind scheduler = SchedulerKind::identity;
  std::optional<SchedulerPolicy> policy;  // required for via
  Rational robust_step = 0;               // robust rates rounded up to this grid
  DDState dd;
  // Rate -> power at each gain; required for dd, fallback when no table.
  std::shared_ptr<const FadingPowerCurve> curve;
};

// Joint rule for schemes whose powers depend on every user's rate.
using JointPowerRule =
    std::function<std::vector<double>(const std::vector<double>& rates, const std::vector<double>& gains)>;

struct SimConfig {
  std::size_t slots = 100000;
  std::size_t reps = 1;
  std::uint64_t seed = 1;
  std::size_t dmax = 1;
  std::vector<SimUser> users;
  std::optional<PowerTable> table;  // exact lookup for non-dd users
  JointPowerRule joint;             // overrides table and curves when set
  bool trace = false;               // per-slot rows of replication 0

  void validate() const;
};

struct TraceRow {
  std::size_t slot;
  std::size_t user;
  double arrival, fading, rate, power;
  bool outage;
  bool operator==(const TraceRow&) const = default;
};

struct SimReport {
  double mean = 0.0;     // average sum-power per slot
  double std_err = 0.0;  // across replications, or 20 batch means when reps = 1
  std::size_t slots = 0, reps = 0;
  std::uint64_t outages = 0;
  std::uint64_t delay_violations = 0;
  std::vector<double> user_mean;
  std::vector<std::map<double, std::uint64_t>> rate_hist, power_hist;
  std::vector<TraceRow> trace;

  bool operator==(const SimReport&) const = default;
};

// Uniform double in [0,1) from (seed, user, replication, counter); every
// (user, replication) pair is an independent stream.
double stream_uniform(std::uint64_t seed, std::uint64_t user, std::uint64_t rep, std::uint64_t counter);

SimReport run(const SimConfig& cfg);
// All users dd; delay audit must stay at zero.
SimReport run_dd_fading(const SimConfig& cfg);

// Per-user DD pipeline: unit-delay allocation on (arrivals, fading), curves
// extended to dmax * max arrival, derivative seeded at E_h[P'(E[A], h)].
SimConfig dd_fading_config(const std::vector<RateFadingLaw>& laws, std::size_t dmax, double beta = 0.9,
                           double step = 1.0);

JointPowerRule centralized_rule();
JointPowerRule tdm_rule(double tau);

}  // namespace dmac
