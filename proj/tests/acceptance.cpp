// Acceptance criteria, one pass/fail line each. Usage: acceptance [--criterion N]
#include "dmac/alloc_continuous.hpp"
#include "dmac/alloc_unit.hpp"
#include "dmac/baselines.hpp"
#include "dmac/iteropt.hpp"
#include "dmac/mdp.hpp"
#include "dmac/sim.hpp"

#include "golden.hpp"
#include "instances.hpp"
#include "oracle.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>

using namespace dmac;

namespace {

struct Outcome {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// Pinned tolerances.
constexpr double kC2Rel = 0.01;
constexpr double kC4Abs = 1e-9;
constexpr double kC5Gap = 1e-9;
constexpr double kC6Rel = 0.01;
constexpr double kC7Slack = 1e-9;
constexpr double kC8Tol = 1e-9;
constexpr double kC9Rel = 0.005;
constexpr double kC9Residual = 1e-6;
constexpr double kC10Tight = 1e-9;
constexpr double kC10Path = 1e-12;
constexpr std::uint64_t kInstanceSeed = 20240611;

std::vector<std::vector<RateFadingLaw>> shared_instances() {
  std::mt19937_64 rng(kInstanceSeed);
  std::vector<std::vector<RateFadingLaw>> out;
  for (int i = 0; i < 200; ++i) out.push_back(testing::random_instance(rng));
  return out;
}

Outcome criterion1() {
  RateFadingLaw l1(DiscreteLaw({{2, Rational(1, 3)}, {3, Rational(2, 3)}}),
                   DiscreteLaw({{1, Rational(1, 4)}, {3, Rational(3, 4)}}));
  RateFadingLaw l2(DiscreteLaw({{1, Rational(1, 4)}, {2, Rational(3, 4)}}),
                   DiscreteLaw({{1, Rational(1, 2)}, {2, Rational(1, 2)}}));
  build_pseudo_cdf(l1, l2);  // warm-up
  auto t0 = Clock::now();
  GammaGrid g = build_pseudo_cdf(l1, l2);
  double ms = 1e3 * seconds_since(t0);
  const std::vector<Rational> alpha{0, Rational(1, 12), Rational(1, 6), Rational(1, 3), Rational(1, 2)};
  const std::vector<Rational> beta{0, Rational(1, 8), Rational(3, 16), Rational(9, 16), Rational(3, 4)};
  bool ok = g.raw_levels(0) == alpha && g.raw_levels(1) == beta && g.d0 == Rational(1, 4);
  std::string levels;
  for (const auto& x : g.raw_levels(0)) levels += to_string(x) + " ";
  levels += "| ";
  for (const auto& x : g.raw_levels(1)) levels += to_string(x) + " ";
  return {ok && ms < 1.0, "levels " + levels + "d0 " + to_string(g.d0) + " (exact), " + fmt(ms) + " ms (< 1 ms)"};
}

Outcome criterion2() {
  auto t0 = Clock::now();
  DiscreteLaw arrivals = DiscreteLaw::uniform({1, 2, 3});
  SchedulerPolicy s = testing::tdma_scheduler();
  DiscreteLaw m1 = stationary_rate_law(s, arrivals), m2 = stationary_rate_law(s, arrivals);
  AllocationReport rep = allocate_fixed(m1, m2, 10, 1);
  RatePowerCurve curve = rate_power_curve(rep, 0, 6.0);
  const double want[] = {19.2, 96, 403.2, 1632};
  bool ok = true;
  std::string got;
  for (int r = 1; r <= 4; ++r) {
    double p = curve(r);
    got += fmt(p) + " ";
    ok = ok && std::abs(p - want[r - 1]) <= kC2Rel * want[r - 1];
  }
  double sec = seconds_since(t0);
  return {ok && sec < 1.0, "P_1(1..4) = " + got + "vs 19.2 96 403.2 1632 (1%), " + fmt(sec) + " s (< 1 s)"};
}

Outcome criterion3() {
  auto t0 = Clock::now();
  IterOptConfig cfg;
  cfg.init = IterInit::tdma;
  DiscreteLaw a = DiscreteLaw::uniform({1, 2, 3});
  IterOptTrace tr = iteropt({a, a}, {Rational(10), Rational(1)}, 2, cfg);
  double sec = seconds_since(t0);
  const auto& fin = tr.final_step();
  bool s1 = fin.schedulers[0] == testing::refined_scheduler_1();
  bool s2 = fin.schedulers[1] == testing::refined_scheduler_2();
  Rational entry = fin.schedulers[0].matrix_entry(2, 3);
  bool ok = s1 && s2 && tr.iterations() <= 5 && sec < 10.0;
  std::ostringstream os;
  os << tr.iterations() << " iterations (<= 5), S_1 entry (2,3) = " << to_string(entry) << " (want 3), S_1 "
     << (s1 ? "matches" : "differs") << ", S_2 " << (s2 ? "matches" : "differs") << ", " << fmt(sec)
     << " s (< 10 s)";
  return {ok, os.str()};
}

Outcome criterion4() {
  auto t0 = Clock::now();
  double worst = 0.0;
  int audits = 0;
  for (const auto& inst : shared_instances()) {
    GammaGrid g = build_pseudo_cdf(inst[0], inst[1]);
    AllocationReport rep = allocate_dynamic(g);
    worst = std::max(worst, std::abs(average_sum_power(rep.table, rep.laws) - lower_bound(g)));
    if (verify_outage_free(rep.table, rep.laws)) ++audits;
  }
  double sec = seconds_since(t0);
  bool ok = worst <= kC4Abs && audits == 200 && sec < 30.0;
  return {ok, "max |average - bound| = " + fmt(worst) + " (<= 1e-9), outage audits passed " +
                  std::to_string(audits) + "/200, " + fmt(sec) + " s (< 30 s)"};
}

Outcome criterion5() {
  double worst = std::numeric_limits<double>::infinity();
  std::string where;
  for (const auto& inst : shared_instances()) {
    double c = centralized_average(inst[0], inst[1]);
    double d = allocate_dynamic(build_pseudo_cdf(inst[0], inst[1])).achieved;
    double g = gtdm_optimize(inst[0], inst[1]).average;
    double s = tdm_average(inst[0], inst[1], 0.5);
    const std::pair<const char*, double> gaps[] = {{"decentral - central", d - c},
                                                   {"gtdm - decentral", g - d},
                                                   {"stdm - gtdm", s - g}};
    for (const auto& [name, gap] : gaps)
      if (gap < worst) {
        worst = gap;
        where = name;
      }
  }
  return {worst >= -kC5Gap, "smallest gap " + fmt(worst) + " (" + where + ", >= -1e-9) over 200 instances"};
}

Outcome criterion6() {
  auto t0 = Clock::now();
  DiscreteLaw law({{1, Rational(3, 4)}, {2, Rational(1, 4)}});
  double oracle = testing::finite_sum_bound(law, law, 1, 1);
  AllocationReport rep = allocate_fixed(law, law, 1, 1);
  SimConfig sc;
  sc.slots = 100000;
  sc.seed = 6;
  sc.table = rep.table;
  sc.users = {SimUser{law}, SimUser{law}};
  SimReport sim = run(sc);
  double sec = seconds_since(t0);
  bool ok = std::abs(oracle - 75.0) <= 1e-9 && std::abs(rep.achieved - 75.0) <= 1e-9 && std::abs(sim.mean - 75.0) <= kC6Rel * 75.0 &&
            sim.outages == 0 && sim.delay_violations == 0 && sec < 20.0;
  return {ok, "oracle " + fmt(oracle) + ", allocator " + fmt(rep.achieved) + ", simulated " + fmt(sim.mean) +
                  " (1%), outages " + std::to_string(sim.outages) + ", delay violations " +
                  std::to_string(sim.delay_violations) + ", " + fmt(sec) + " s (< 20 s)"};
}

// Largest increase along delta = 1, 1/2, 1/4 over 20 random D_max = 2 instances.
double delta_increase(IterInit init, int* violations) {
  std::mt19937_64 rng(kInstanceSeed + 7);
  double worst = -std::numeric_limits<double>::infinity();
  *violations = 0;
  for (int i = 0; i < 20; ++i) {
    auto inst = testing::random_delay_instance(rng);
    double prev = std::numeric_limits<double>::infinity();
    for (const Rational& d : {Rational(1), Rational(1, 2), Rational(1, 4)}) {
      IterOptConfig cfg;
      cfg.init = init;
      cfg.vi.delta = d;
      double v = iteropt(inst.arrivals, inst.gains, 2, cfg).final_step().average;
      if (std::isfinite(prev)) {
        worst = std::max(worst, v - prev);
        if (v > prev + kC7Slack) ++*violations;
      }
      prev = v;
    }
  }
  return worst;
}

Outcome criterion7() {
  int bad = 0, bad_tdma = 0;
  double worst = delta_increase(IterInit::unitdelay, &bad);
  double worst_tdma = delta_increase(IterInit::tdma, &bad_tdma);
  return {bad == 0, "default start: largest step increase " + fmt(worst) + " (<= 1e-9), " + std::to_string(bad) +
                        " violations; TDMA start (informational): largest increase " + fmt(worst_tdma) + ", " +
                        std::to_string(bad_tdma) + " violations"};
}

// Nondecreasing and slope differences >= -tol on (rate, power) points.
bool convex_points(std::vector<std::pair<double, double>> pts, double tol, std::string* why) {
  if (pts.empty() || pts.front().first != 0.0) pts.insert(pts.begin(), {0.0, 0.0});
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < pts.size(); ++k) {
    double dr = pts[k].first - pts[k - 1].first, dp = pts[k].second - pts[k - 1].second;
    if (dp < -tol) {
      *why = "power decreases at rate " + fmt(pts[k].first);
      return false;
    }
    if (dr <= 0) continue;
    double slope = dp / dr;
    if (slope - last < -tol) {
      *why = "slope drops from " + fmt(last) + " to " + fmt(slope) + " at rate " + fmt(pts[k].first);
      return false;
    }
    last = slope;
  }
  return true;
}

bool table_ok(const PowerTable& t, std::string* why) {
  for (std::size_t u = 0; u < t.user_count(); ++u) {
    std::map<Rational, std::vector<std::pair<double, double>>> by_gain;
    for (const auto& e : t.users[u]) by_gain[e.gain].push_back({to_double(e.rate), e.power});
    for (auto& [g, pts] : by_gain)
      if (!convex_points(pts, kC8Tol, why)) return false;
  }
  return true;
}

Outcome criterion8() {
  std::size_t checked = 0;
  std::string why;
  auto fail = [&](const std::string& what) { return Outcome{false, what + ": " + why}; };
  for (const auto& inst : shared_instances()) {
    AllocationReport rep = allocate_dynamic(build_pseudo_cdf(inst[0], inst[1]));
    ++checked;
    if (!table_ok(rep.table, &why)) return fail("unit-delay table");
    for (std::size_t u = 0; u < 2; ++u) {
      double r_max = 2 * to_double(inst[u].rate.max_support()) + 1;
      TabulatedFadingCurve fc = fading_power_curve(rep, u, r_max, 0.5);
      for (const auto& [g, c] : fc.curves()) {
        ++checked;
        if (!convex_points(c.knots(), kC8Tol, &why)) return fail("extended curve");
      }
    }
  }
  std::mt19937_64 rng(kInstanceSeed + 7);
  for (int i = 0; i < 20; ++i) {
    auto inst = testing::random_delay_instance(rng);
    IterOptConfig cfg;
    cfg.vi.delta = Rational(1, 4);
    cfg.init = i % 2 ? IterInit::tdma : IterInit::unitdelay;
    IterOptTrace tr = iteropt(inst.arrivals, inst.gains, 2, cfg);
    for (const auto& step : tr.steps) {
      ++checked;
      if (!table_ok(step.allocation.table, &why)) return fail("refinement table");
      for (std::size_t u = 0; u < 2; ++u) {
        ++checked;
        double r_max = 2 * to_double(inst.arrivals[u].max_support());
        if (!convex_points(rate_power_curve(step.allocation, u, r_max, 0.25).knots(), kC8Tol, &why))
          return fail("refinement curve");
      }
    }
  }
  DiscreteLaw law({{1, Rational(3, 4)}, {2, Rational(1, 4)}});
  ContinuousLawSpec spec = ContinuousLawSpec::smoothed(law, 1e-3, 4096);
  ContinuousAllocation ca = allocate_continuous(spec, ContinuousLawSpec::uniform(0, 2, 4096), 0.5);
  std::vector<std::pair<double, double>> c1, c2;
  for (const auto& s : ca.samples) {
    c1.push_back({s.rate_1, s.power_1});
    c2.push_back({s.rate_2, s.power_2});
  }
  checked += 2;
  if (!convex_points(c1, kC8Tol, &why) || !convex_points(c2, kC8Tol, &why)) return fail("continuous curve");
  for (double alpha : {0.5, 1.0, 10.0}) {
    PowerCurve tdma = stdm_curve(alpha);
    std::vector<std::pair<double, double>> pts;
    for (int k = 0; k <= 24; ++k) pts.push_back({0.25 * k, tdma(0.25 * k)});
    ++checked;
    if (!convex_points(pts, kC8Tol, &why)) return fail("TDMA curve");
  }
  return {true, std::to_string(checked) + " tables and curves nondecreasing with slope drops >= -1e-9"};
}

Outcome criterion9() {
  DiscreteLaw law({{1, Rational(3, 4)}, {2, Rational(1, 4)}});
  double discrete = allocate_fixed(law, law, 1, 1).achieved;
  ContinuousLawSpec spec = ContinuousLawSpec::smoothed(law, 1e-3, 4096);
  ContinuousAllocation ca = allocate_continuous(spec, spec, 1.0);
  double rel = std::abs(ca.average - discrete) / discrete;
  bool ok = rel <= kC9Rel && ca.residual < kC9Residual;
  return {ok, "continuous " + fmt(ca.average) + " vs discrete " + fmt(discrete) + " (rel " + fmt(rel) +
                  " <= 0.5%), sum-equality residual " + fmt(ca.residual) + " (< 1e-6)"};
}

Outcome criterion10() {
  const std::vector<DiscreteLaw> rates{DiscreteLaw::point(1), DiscreteLaw::point(Rational(1, 2)),
                                       DiscreteLaw::point(Rational(3, 2))};
  const std::vector<Rational> gains{4, 2, 1};
  AllocationReport rep = allocate_l_user(rates, gains);
  std::vector<double> b, rx;
  for (std::size_t i = 0; i < 3; ++i) {
    b.push_back(to_double(rates[i].max_support()));
    rx.push_back(to_double(gains[i]) * *rep.table.find(i, rates[i].max_support(), gains[i]));
  }
  int satisfied = 0;
  for (std::size_t mask = 1; mask < 8; ++mask) {
    double lhs = 0, bits = 0;
    for (std::size_t i = 0; i < 3; ++i)
      if (mask >> i & 1) {
        lhs += rx[i];
        bits += b[i];
      }
    if (lhs >= rate_cost(bits) * (1 - kC10Tight)) ++satisfied;
  }
  double total = rate_cost(b[0] + b[1] + b[2]);
  double tight = std::abs(rx[0] + rx[1] + rx[2] - total) / total;

  double worst = 0.0;
  std::mt19937_64 rng(kInstanceSeed + 10);
  for (int i = 0; i < 50; ++i) {
    DiscreteLaw l1 = testing::random_law(rng, testing::rate_pool(), 6);
    DiscreteLaw l2 = testing::random_law(rng, testing::rate_pool(), 6);
    Rational g1 = testing::gain_pool()[i % 7], g2 = testing::gain_pool()[(i * 3) % 7];
    if (g1 < g2) std::swap(g1, g2);
    AllocationReport a = allocate_l_user({l1, l2}, {g1, g2});
    AllocationReport f = allocate_fixed(l1, l2, g1, g2);
    for (std::size_t u = 0; u < 2; ++u)
      for (const auto& e : f.table.users[u]) {
        auto p = a.table.find(u, e.rate, e.gain);
        worst = std::max(worst, p ? std::abs(*p - e.power) : std::numeric_limits<double>::infinity());
      }
  }
  bool ok = satisfied == 7 && tight <= kC10Tight && worst <= kC10Path;
  return {ok, "L=3: " + std::to_string(satisfied) + "/7 constraints hold, sum gap " + fmt(tight) +
                  " (<= 1e-9); L=2 vs two-user allocator max entry difference " + fmt(worst) + " (<= 1e-12)"};
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> kCriteria{
    {"pseudo-CDF levels of the two-user fading example", criterion1},
    {"rate-power curve from the TDMA-designed schedulers", criterion2},
    {"refined scheduler matrices from the TDMA start", criterion3},
    {"allocator meets the finite-sum bound, outage-free", criterion4},
    {"centralized <= decentralized <= G-TDM <= S-TDM", criterion5},
    {"Bernoulli arrivals: analytic 75 and simulation", criterion6},
    {"objective nonincreasing as the rate step shrinks", criterion7},
    {"every power table and curve is monotone convex", criterion8},
    {"continuous allocator on a smoothed staircase", criterion9},
    {"L-user recursion: three users and two-user agreement", criterion10},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int k = 1; k < argc; ++k) {
    std::string a = argv[k];
    if (a == "--criterion" && k + 1 < argc) only = std::stoi(argv[++k]);
    else {
      std::cerr << "usage: acceptance [--criterion N]\n";
      return 2;
    }
  }
  if (only < 0 || only > static_cast<int>(kCriteria.size())) {
    std::cerr << "criterion must lie in 1.." << kCriteria.size() << "\n";
    return 2;
  }
  int failed = 0;
  for (std::size_t k = 0; k < kCriteria.size(); ++k) {
    if (only && static_cast<int>(k + 1) != only) continue;
    Outcome o;
    try {
      o = kCriteria[k].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::cout << "criterion " << k + 1 << " [" << kCriteria[k].first << "]: " << (o.pass ? "PASS" : "FAIL") << " - "
              << o.detail << std::endl;
    if (!o.pass) ++failed;
  }
  return failed ? 1 : 0;
}
