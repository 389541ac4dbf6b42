#pragma once

#include "dmac/curve.hpp"
#include "dmac/dist.hpp"

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace dmac {

using ExactState = std::vector<Rational>;

// Earliest-deadline-first service of `action`, shift by one slot, arrival
// enters the last position. Rejects action < s[0] or action > sum(s).
ExactState step_state(const ExactState& s, const Rational& action, const Rational& arrival);
QueueState step_state(const QueueState& s, double action, double arrival);

struct VIConfig {
  double gamma = 0.99;
  double tol = 1e-10;  // sup-norm change relative to sup |V|
  std::size_t max_iter = 200000;
  Rational delta = 1;
};

struct VIStats {
  std::size_t sweeps = 0;
  double residual = 0.0;
  std::size_t states = 0;
};

class SchedulerPolicy {
 public:
  using Ticks = std::vector<std::int64_t>;

  SchedulerPolicy() = default;
  SchedulerPolicy(std::size_t dmax, Rational delta, std::map<Ticks, std::int64_t> table);

  std::size_t dmax() const { return dmax_; }
  const Rational& delta() const { return delta_; }
  const std::map<Ticks, std::int64_t>& table() const { return table_; }

  Rational rate(const ExactState& s) const;
  double rate(const QueueState& s) const;
  bool contains(const ExactState& s) const;

  // Rows s[0], columns s[1] (the arrival slot); D_max = 2 only.
  std::string render_matrix() const;
  // Entry (row value, column value) of the D_max = 2 matrix.
  Rational matrix_entry(const Rational& urgent, const Rational& fresh) const;

  bool operator==(const SchedulerPolicy& o) const {
    return dmax_ == o.dmax_ && delta_ == o.delta_ && table_ == o.table_;
  }

 private:
  Ticks to_ticks(const ExactState& s) const;
  std::size_t dmax_ = 1;
  Rational delta_ = 1;
  std::map<Ticks, std::int64_t> table_;
};

SchedulerPolicy value_iteration(const PowerCurve& power, const DiscreteLaw& arrivals, std::size_t dmax,
                                const VIConfig& cfg, VIStats* stats = nullptr,
                                std::vector<std::vector<double>>* value_history = nullptr);

// Serves the whole backlog every slot; defined on the states it reaches.
SchedulerPolicy full_drain_policy(const DiscreteLaw& arrivals, std::size_t dmax, const Rational& delta = 1);

// Average per-slot cost of `policy` under `power`, from its stationary law.
double policy_average_cost(const SchedulerPolicy& policy, const PowerCurve& power, const DiscreteLaw& arrivals);

using ExactPolicy = std::function<Rational(const ExactState&)>;

// Marginal law of the scheduled rate under the unique stationary law of the
// chain reachable from the empty queue. Exact rational solve. Throws when
// more than max_states residual states are reachable.
inline constexpr std::size_t kMaxChainStates = 20000;
DiscreteLaw stationary_rate_law(const ExactPolicy& policy, const DiscreteLaw& arrivals, std::size_t dmax,
                                std::size_t max_states = kMaxChainStates);
DiscreteLaw stationary_rate_law(const SchedulerPolicy& policy, const DiscreteLaw& arrivals);

// max over d of the mean of the d most urgent entries.
Rational robust_rate(const ExactState& s);
double robust_rate(const QueueState& s);
// Rounded up to a multiple of step (step 0: exact). Rounding up keeps the
// deadline; a grid state keeps the result within the backlog. The exact
// rule reaches infinitely many residuals, so finite chains need step > 0.
Rational robust_rate(const ExactState& s, const Rational& step);
ExactPolicy robust_policy(const Rational& step = 0);

struct DDState {
  double derivative = 0.0;
  double beta = 0.9;
};

struct DDDecision {
  double rate;
  DDState next;
};

DDDecision dd_rate(const QueueState& s, double gain, const DDState& dd, const FadingPowerCurve& curve);

}  // namespace dmac
