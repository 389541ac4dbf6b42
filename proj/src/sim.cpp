#include "dmac/sim.hpp"

#include "dmac/baselines.hpp"
#include "dmac/iteropt.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace dmac {

SchedulerKind parse_scheduler(const std::string& name) {
  if (name == "identity") return SchedulerKind::identity;
  if (name == "via") return SchedulerKind::via;
  if (name == "robust") return SchedulerKind::robust;
  if (name == "dd") return SchedulerKind::dd;
  throw std::invalid_argument("unknown scheduler '" + name + "' (identity|via|robust|dd)");
}

std::string to_string(SchedulerKind k) {
  switch (k) {
    case SchedulerKind::identity: return "identity";
    case SchedulerKind::via: return "via";
    case SchedulerKind::robust: return "robust";
    case SchedulerKind::dd: return "dd";
  }
  return "?";
}

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

constexpr std::size_t kBatches = 20;

struct Sampler {
  std::vector<Rational> values;
  std::vector<double> cumulative;

  explicit Sampler(const DiscreteLaw& law) {
    double c = 0.0;
    for (const auto& a : law.atoms()) {
      if (a.prob == 0) continue;
      c += to_double(a.prob);
      values.push_back(a.value);
      cumulative.push_back(c);
    }
    if (values.empty()) throw std::invalid_argument("law has no positive mass");
  }
  const Rational& draw(double u) const {
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    return values[std::min<std::size_t>(it - cumulative.begin(), values.size() - 1)];
  }
};

double hist_key(double x) {
  if (x == 0) return 0.0;
  double scale = std::pow(10.0, 8 - std::floor(std::log10(std::abs(x))));
  return std::round(x * scale) / scale;
}

struct RepResult {
  double total = 0.0;
  std::vector<double> user_total;
  std::vector<double> batch_total;
  std::uint64_t outages = 0, violations = 0;
  std::vector<std::map<double, std::uint64_t>> rate_hist, power_hist;
  std::vector<TraceRow> trace;
};

std::string describe_lookup(std::size_t user, const Rational& rate, const Rational& gain) {
  return "no power for user " + std::to_string(user + 1) + " at rate " + to_string(rate) + ", gain " +
         to_string(gain);
}

RepResult run_rep(const SimConfig& cfg, std::size_t rep, const std::vector<Sampler>& arr,
                  const std::vector<Sampler>& fad) {
  const std::size_t L = cfg.users.size();
  RepResult out;
  out.user_total.assign(L, 0.0);
  out.batch_total.assign(kBatches, 0.0);
  out.rate_hist.resize(L);
  out.power_hist.resize(L);
  std::vector<ExactState> exact(L, ExactState(cfg.dmax - 1, Rational(0)));
  std::vector<QueueState> approx(L, QueueState(cfg.dmax - 1, 0.0));
  std::vector<DDState> dd(L);
  for (std::size_t u = 0; u < L; ++u) dd[u] = cfg.users[u].dd;

  std::vector<double> rates(L), gains(L), powers(L), received(L), arrivals(L);
  std::vector<Rational> exact_rate(L), exact_gain(L);
  for (std::size_t t = 0; t < cfg.slots; ++t) {
    for (std::size_t u = 0; u < L; ++u) {
      const SimUser& usr = cfg.users[u];
      const Rational& a = arr[u].draw(stream_uniform(cfg.seed, u, rep, 2 * t));
      exact_gain[u] = fad[u].draw(stream_uniform(cfg.seed, u, rep, 2 * t + 1));
      gains[u] = to_double(exact_gain[u]);
      arrivals[u] = to_double(a);
      if (usr.scheduler == SchedulerKind::dd) {
        QueueState s = approx[u];
        s.push_back(arrivals[u]);
        double total = std::accumulate(s.begin(), s.end(), 0.0);
        DDDecision d = dd_rate(s, gains[u], dd[u], *usr.curve);
        double r = d.rate;
        double slack = 1e-9 * std::max(1.0, total);
        if (r < s[0] - slack || r > total + slack) {
          ++out.violations;
          r = std::clamp(r, s[0], total);
        }
        dd[u] = d.next;
        QueueState nxt = step_state(s, r, 0.0);
        nxt.pop_back();
        approx[u] = std::move(nxt);
        rates[u] = r;
        continue;
      }
      ExactState s = exact[u];
      s.push_back(a);
      Rational total = 0;
      for (const auto& x : s) total += x;
      Rational r;
      switch (usr.scheduler) {
        case SchedulerKind::identity: r = total; break;
        case SchedulerKind::via: r = usr.policy->rate(s); break;
        default: r = robust_rate(s, usr.robust_step); break;
      }
      if (r < s[0] || r > total) {
        ++out.violations;
        r = r < s[0] ? s[0] : total;
      }
      ExactState nxt = step_state(s, r, Rational(0));
      nxt.pop_back();
      exact[u] = std::move(nxt);
      exact_rate[u] = r;
      rates[u] = to_double(r);
    }

    if (cfg.joint) {
      powers = cfg.joint(rates, gains);
    } else {
      for (std::size_t u = 0; u < L; ++u) {
        const SimUser& usr = cfg.users[u];
        if (usr.scheduler != SchedulerKind::dd && cfg.table) {
          auto p = cfg.table->find(u, exact_rate[u], exact_gain[u]);
          if (!p) throw std::runtime_error(describe_lookup(u, exact_rate[u], exact_gain[u]));
          powers[u] = *p;
        } else {
          powers[u] = usr.curve->power(rates[u], gains[u]);
        }
      }
    }
    double slot_sum = 0.0;
    for (std::size_t u = 0; u < L; ++u) {
      received[u] = gains[u] * powers[u];
      slot_sum += powers[u];
      out.user_total[u] += powers[u];
      ++out.rate_hist[u][hist_key(rates[u])];
      ++out.power_hist[u][hist_key(powers[u])];
    }
    bool outage = !tuple_outage(rates, received).empty();
    if (outage) ++out.outages;
    out.total += slot_sum;
    out.batch_total[t * kBatches / cfg.slots] += slot_sum;
    if (cfg.trace && rep == 0)
      for (std::size_t u = 0; u < L; ++u)
        out.trace.push_back({t, u, arrivals[u], gains[u], rates[u], powers[u], outage});
  }
  return out;
}

double std_error(const std::vector<double>& xs) {
  const double n = static_cast<double>(xs.size());
  if (xs.size() < 2) return 0.0;
  double m = std::accumulate(xs.begin(), xs.end(), 0.0) / n, ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / (n - 1) / n);
}

}  // namespace

double stream_uniform(std::uint64_t seed, std::uint64_t user, std::uint64_t rep, std::uint64_t counter) {
  std::uint64_t key = splitmix(splitmix(splitmix(seed) ^ user) ^ (rep * 0xd1b54a32d192ed03ull));
  return static_cast<double>(splitmix(key ^ splitmix(counter)) >> 11) * 0x1.0p-53;
}

void SimConfig::validate() const {
  if (slots < 1) throw std::invalid_argument("sim.slots must be at least 1");
  if (reps < 1) throw std::invalid_argument("sim.reps must be at least 1");
  if (dmax < 1) throw std::invalid_argument("dmax must be at least 1");
  if (users.empty()) throw std::invalid_argument("at least one user is required");
  if (table && table->user_count() != users.size())
    throw std::invalid_argument("power table and user list differ in size");
  for (std::size_t u = 0; u < users.size(); ++u) {
    const SimUser& usr = users[u];
    std::string who = "users[" + std::to_string(u) + "]";
    if (usr.arrivals.empty()) throw std::invalid_argument(who + ".arrivals is empty");
    if (usr.fading.empty()) throw std::invalid_argument(who + ".fading is empty");
    if (usr.fading.min_value() <= 0) throw std::invalid_argument(who + ".fading gains must be positive");
    if (usr.scheduler == SchedulerKind::via) {
      if (!usr.policy) throw std::invalid_argument(who + " uses via without a policy");
      if (usr.policy->dmax() != dmax) throw std::invalid_argument(who + " policy D_max differs from dmax");
    }
    if (usr.scheduler == SchedulerKind::dd && !usr.curve)
      throw std::invalid_argument(who + " uses dd without a power curve");
    if (!joint && !table && !usr.curve) throw std::invalid_argument(who + " has no power table or curve");
  }
}

SimReport run(const SimConfig& cfg) {
  cfg.validate();
  std::vector<Sampler> arr, fad;
  for (const auto& u : cfg.users) {
    arr.emplace_back(u.arrivals);
    fad.emplace_back(u.fading);
  }
  std::vector<RepResult> reps(cfg.reps);
  const std::size_t width = std::max(1u, std::thread::hardware_concurrency());
  for (std::size_t lo = 0; lo < cfg.reps; lo += width) {
    std::vector<std::future<RepResult>> jobs;
    for (std::size_t r = lo; r < std::min(cfg.reps, lo + width); ++r)
      jobs.push_back(std::async(width > 1 ? std::launch::async : std::launch::deferred, run_rep, std::cref(cfg), r,
                                std::cref(arr), std::cref(fad)));
    for (std::size_t k = 0; k < jobs.size(); ++k) reps[lo + k] = jobs[k].get();
  }

  const std::size_t L = cfg.users.size();
  SimReport rep;
  rep.slots = cfg.slots;
  rep.reps = cfg.reps;
  rep.user_mean.assign(L, 0.0);
  rep.rate_hist.resize(L);
  rep.power_hist.resize(L);
  const double n = static_cast<double>(cfg.slots) * static_cast<double>(cfg.reps);
  std::vector<double> means;
  for (auto& r : reps) {
    rep.mean += r.total;
    means.push_back(r.total / static_cast<double>(cfg.slots));
    rep.outages += r.outages;
    rep.delay_violations += r.violations;
    for (std::size_t u = 0; u < L; ++u) {
      rep.user_mean[u] += r.user_total[u];
      for (auto [k, c] : r.rate_hist[u]) rep.rate_hist[u][k] += c;
      for (auto [k, c] : r.power_hist[u]) rep.power_hist[u][k] += c;
    }
  }
  rep.mean /= n;
  for (double& m : rep.user_mean) m /= n;
  if (cfg.reps >= 2) {
    rep.std_err = std_error(means);
  } else if (cfg.slots >= kBatches) {
    std::vector<double> batch;
    for (std::size_t b = 0; b < kBatches; ++b) {
      // Slot t lands in batch floor(t * kBatches / slots).
      std::size_t first = (b * cfg.slots + kBatches - 1) / kBatches;
      std::size_t last = ((b + 1) * cfg.slots + kBatches - 1) / kBatches;
      batch.push_back(reps[0].batch_total[b] / static_cast<double>(last - first));
    }
    rep.std_err = std_error(batch);
  }
  rep.trace = std::move(reps[0].trace);
  return rep;
}

SimReport run_dd_fading(const SimConfig& cfg) {
  for (const auto& u : cfg.users)
    if (u.scheduler != SchedulerKind::dd) throw std::invalid_argument("run_dd_fading needs dd schedulers for all users");
  return run(cfg);
}

SimConfig dd_fading_config(const std::vector<RateFadingLaw>& laws, std::size_t dmax, double beta, double step) {
  if (laws.size() != 2) throw std::invalid_argument("two users required");
  if (!(beta > 0 && beta <= 1)) throw std::invalid_argument("DD smoothing must lie in (0,1]");
  AllocationReport report = allocate_dynamic(build_pseudo_cdf(laws[0], laws[1]));
  SimConfig cfg;
  cfg.dmax = dmax;
  for (std::size_t u = 0; u < 2; ++u) {
    SimUser usr;
    usr.arrivals = laws[u].rate;
    usr.fading = laws[u].fading;
    usr.scheduler = SchedulerKind::dd;
    double r_max = static_cast<double>(dmax) * to_double(laws[u].rate.max_support());
    auto curve = std::make_shared<TabulatedFadingCurve>(fading_power_curve(report, u, r_max, step));
    double mean_arrival = to_double(laws[u].rate.mean());
    usr.dd.beta = beta;
    usr.dd.derivative = laws[u].fading.expected_value([&](double h) { return curve->slope(mean_arrival, h); });
    usr.curve = std::move(curve);
    cfg.users.push_back(std::move(usr));
  }
  cfg.table = report.table;
  return cfg;
}

JointPowerRule centralized_rule() {
  return [](const std::vector<double>& rates, const std::vector<double>& gains) {
    if (rates.size() != 2) throw std::invalid_argument("centralized rule is defined for two users");
    auto [p1, p2] = centralized_power(rates[0], rates[1], gains[0], gains[1]);
    return std::vector<double>{p1, p2};
  };
}

JointPowerRule tdm_rule(double tau) {
  if (!(tau > 0 && tau < 1)) throw std::invalid_argument("time fraction must lie in (0,1)");
  return [tau](const std::vector<double>& rates, const std::vector<double>& gains) {
    if (rates.size() != 2) throw std::invalid_argument("TDM rule is defined for two users");
    std::vector<double> p(2);
    for (std::size_t u = 0; u < 2; ++u) {
      double share = u == 0 ? tau : 1 - tau;
      p[u] = share * std::expm1(2 * rates[u] / share * std::log(2.0)) / gains[u];
    }
    return p;
  };
}

}  // namespace dmac
