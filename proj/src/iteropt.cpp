#include "dmac/iteropt.hpp"

#include "dmac/baselines.hpp"

#include <cmath>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dmac {

RatePowerCurve rate_power_curve(const AllocationReport& report, std::size_t user, double r_max, double step,
                                std::optional<Rational> gain) {
  if (user >= report.table.user_count()) throw std::out_of_range("no such user in the allocation");
  if (!(step > 0)) throw std::invalid_argument("dummy rate step must be positive");
  const auto top = report.top_pairs();
  const auto top_rx = report.top_received();
  if (!gain) gain = top[user].gain;

  std::vector<std::pair<double, double>> knots{{0.0, 0.0}};
  for (const auto& e : report.table.users[user])
    if (e.gain == *gain && e.rate > 0) knots.push_back({to_double(e.rate), e.power});
  if (knots.size() == 1 && report.table.users[user].empty() && top[user].gain != *gain)
    throw std::invalid_argument("no entries at fading gain " + to_string(*gain));
  double top_rate = knots.back().first;
  if (r_max < top_rate - 1e-12) {
    std::ostringstream os;
    os << "r_max " << r_max << " is below the largest assigned rate " << top_rate;
    throw std::invalid_argument(os.str());
  }
  double others_rate = 0.0, others_rx = 0.0;
  for (std::size_t j = 0; j < top.size(); ++j)
    if (j != user) {
      others_rate += to_double(top[j].rate);
      others_rx += top_rx[j];
    }
  double g = to_double(*gain);
  auto dummy = [&](double r) { return (rate_cost(r + others_rate) - others_rx) / g; };
  for (int k = 1;; ++k) {
    double r = top_rate + k * step;
    if (r >= r_max - 1e-12) break;
    knots.push_back({r, dummy(r)});
  }
  if (r_max > top_rate + 1e-12) knots.push_back({r_max, dummy(r_max)});
  return RatePowerCurve(std::move(knots));
}

TabulatedFadingCurve fading_power_curve(const AllocationReport& report, std::size_t user, double r_max, double step) {
  std::set<Rational> gains;
  for (const auto& h : report.laws.at(user).fading.atoms()) gains.insert(h.value);
  std::map<double, RatePowerCurve> by_gain;
  for (const auto& h : gains) by_gain.emplace(to_double(h), rate_power_curve(report, user, r_max, step, h));
  return TabulatedFadingCurve(std::move(by_gain));
}

namespace {

double curve_span(const std::vector<DiscreteLaw>& arrivals, std::size_t user, std::size_t dmax) {
  return static_cast<double>(dmax) * to_double(arrivals[user].max_support());
}

void check_inputs(const std::vector<DiscreteLaw>& arrivals, const std::array<Rational, 2>& gains, std::size_t dmax) {
  if (arrivals.size() != 2) throw std::invalid_argument("two arrival laws required");
  if (gains[0] <= 0 || gains[1] <= 0) throw std::invalid_argument("channel gains must be positive");
  if (dmax < 1) throw std::invalid_argument("D_max must be at least 1");
}

}  // namespace

IterOptStep iteropt_round(const IterOptStep& incumbent, const std::vector<DiscreteLaw>& arrivals,
                          const std::array<Rational, 2>& gains, std::size_t dmax, const VIConfig& vi) {
  check_inputs(arrivals, gains, dmax);
  if (incumbent.laws.size() != 2 || incumbent.schedulers.size() != 2)
    throw std::invalid_argument("incumbent step needs two schedulers and two rate laws");
  double step = to_double(vi.delta);
  std::vector<RatePowerCurve> curves;
  for (std::size_t u = 0; u < 2; ++u)
    curves.push_back(rate_power_curve(incumbent.allocation, u, curve_span(arrivals, u, dmax), step));
  auto solve = [&](std::size_t u) { return value_iteration(curves[u].as_function(), arrivals[u], dmax, vi); };
  auto other = std::async(std::launch::async, solve, 1);
  std::array<SchedulerPolicy, 2> fresh{solve(0), other.get()};

  IterOptStep s;
  for (std::size_t u = 0; u < 2; ++u) {
    // The discounted optimum can lose to the incumbent in average cost; keep
    // the incumbent then so the average sum-power never increases.
    DiscreteLaw law = stationary_rate_law(fresh[u], arrivals[u]);
    auto power = curves[u].as_function();
    double was = incumbent.laws[u].expected_value(power), now = law.expected_value(power);
    if (now > was + 1e-12 * std::max(1.0, std::abs(was))) {
      s.schedulers.push_back(incumbent.schedulers[u]);
      s.laws.push_back(incumbent.laws[u]);
    } else {
      s.schedulers.push_back(std::move(fresh[u]));
      s.laws.push_back(std::move(law));
    }
  }
  s.allocation = allocate_fixed(s.laws[0], s.laws[1], gains[0], gains[1]);
  s.average = s.allocation.achieved;
  return s;
}

IterOptTrace iteropt(const std::vector<DiscreteLaw>& arrivals, const std::array<Rational, 2>& gains, std::size_t dmax,
                     const IterOptConfig& cfg) {
  check_inputs(arrivals, gains, dmax);
  IterOptTrace trace;
  trace.dmax = dmax;
  trace.gains = gains;
  trace.arrivals = arrivals;

  IterOptStep first;
  if (cfg.init == IterInit::tdma && dmax > 1) {
    for (std::size_t u = 0; u < 2; ++u) {
      first.schedulers.push_back(value_iteration(stdm_curve(to_double(gains[u]), 0.5), arrivals[u], dmax, cfg.vi));
      first.laws.push_back(stationary_rate_law(first.schedulers[u], arrivals[u]));
    }
  } else {
    for (std::size_t u = 0; u < 2; ++u) first.schedulers.push_back(full_drain_policy(arrivals[u], dmax, cfg.vi.delta));
    first.laws = arrivals;
  }
  first.allocation = allocate_fixed(first.laws[0], first.laws[1], gains[0], gains[1]);
  first.average = first.allocation.achieved;
  trace.steps.push_back(std::move(first));
  if (dmax == 1) {
    trace.halt_reason = "D_max = 1: the unit-delay allocation is final";
    return trace;
  }

  for (std::size_t k = 1; k <= cfg.max_outer; ++k) {
    const IterOptStep& prev = trace.steps.back();
    IterOptStep next = iteropt_round(prev, arrivals, gains, dmax, cfg.vi);
    double before = prev.average, after = next.average;
    trace.steps.push_back(std::move(next));
    if (after > before + 1e-9 * std::max(1.0, std::abs(before))) {
      std::ostringstream os;
      os.precision(17);
      os << "average sum-power increased from " << before << " to " << after << " in round " << k;
      throw std::runtime_error(os.str());
    }
    if (std::abs(after - before) < cfg.halt_tol) {
      trace.halt_reason = "average sum-power invariant";
      return trace;
    }
  }
  trace.halt_reason = "outer iteration limit reached";
  return trace;
}

}  // namespace dmac
