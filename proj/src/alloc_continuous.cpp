#include "dmac/alloc_continuous.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dmac {

namespace {

constexpr double kBisectTol = 1e-10;
constexpr std::size_t kMinGrid = 64;

double exp4(double s) {
  double v = std::exp2(2.0 * s);
  if (!std::isfinite(v)) {
    std::ostringstream os;
    os << "non-finite integrand at rate sum " << s;
    throw std::runtime_error(os.str());
  }
  return v;
}

}  // namespace

ContinuousLawSpec ContinuousLawSpec::point_mass(double b, std::size_t n_grid) {
  return {[b](double x) { return x >= b ? 1.0 : 0.0; }, b, b, n_grid};
}

ContinuousLawSpec ContinuousLawSpec::uniform(double lo, double hi, std::size_t n_grid) {
  if (!(hi > lo)) throw std::invalid_argument("uniform law needs lo < hi");
  return {[lo, hi](double x) { return std::clamp((x - lo) / (hi - lo), 0.0, 1.0); }, lo, hi, n_grid};
}

ContinuousLawSpec ContinuousLawSpec::smoothed(const DiscreteLaw& law, double width, std::size_t n_grid) {
  if (!(width > 0)) throw std::invalid_argument("smoothing width must be positive");
  std::vector<std::pair<double, double>> ramps;  // (start, probability)
  for (const auto& a : law.atoms()) {
    if (a.prob == 0) continue;
    double lo = std::max(0.0, to_double(a.value) - width / 2);
    ramps.push_back({lo, to_double(a.prob)});
  }
  double b_min = ramps.front().first, b_max = ramps.back().first + width;
  auto cdf = [ramps, width](double x) {
    double c = 0.0;
    for (const auto& [lo, p] : ramps) c += p * std::clamp((x - lo) / width, 0.0, 1.0);
    return std::min(c, 1.0);
  };
  return {cdf, b_min, b_max, n_grid};
}

void ContinuousLawSpec::validate() const {
  if (!cdf) throw std::invalid_argument("cdf is not set");
  if (!(std::isfinite(b_min) && std::isfinite(b_max)) || b_min < 0 || b_max < b_min)
    throw std::invalid_argument("support must satisfy 0 <= b_min <= b_max < inf");
  if (n_grid < kMinGrid) throw std::invalid_argument("n_grid must be at least 64");
  double eps = 1e-9 * std::max(1.0, std::abs(b_min));
  if (cdf(b_min - eps) > 1e-12) throw std::invalid_argument("cdf must vanish below b_min");
  if (cdf(b_max) < 1 - 1e-12) throw std::invalid_argument("cdf must reach 1 at b_max");
  const std::size_t probes = 4 * n_grid;
  double prev = 0.0;
  for (std::size_t k = 0; k <= probes; ++k) {
    double b = b_min + (b_max - b_min) * static_cast<double>(k) / static_cast<double>(probes);
    double c = cdf(b);
    if (!(c >= 0 && c <= 1)) throw std::invalid_argument("cdf leaves [0,1]");
    if (c < prev - 1e-12) {
      std::ostringstream os;
      os << "cdf is not monotone near " << b;
      throw std::invalid_argument(os.str());
    }
    prev = std::max(prev, c);
  }
}

double ContinuousLawSpec::quantile(double x) const {
  auto reached = [&](double b) { return x > 0 ? cdf(b) >= x : cdf(b) > 0; };
  double lo = b_min, hi = b_max;
  if (reached(lo)) return lo;
  while (hi - lo > kBisectTol) {
    double mid = 0.5 * (lo + hi);
    (reached(mid) ? hi : lo) = mid;
  }
  return hi;
}

ContinuousAllocation allocate_continuous(const ContinuousLawSpec& spec1, const ContinuousLawSpec& spec2,
                                         double alpha) {
  if (!(alpha > 0 && alpha <= 1)) throw std::invalid_argument("gain ratio must lie in (0, 1]");
  spec1.validate();
  spec2.validate();

  // User 1's law is compressed onto [1 - alpha, 1] with an atom at 0 below.
  const double split = 1 - alpha;
  auto b1 = [&](double x) {
    if (alpha < 1 && x <= split) return 0.0;
    return spec1.quantile(std::max(0.0, (x - split) / alpha));
  };
  auto b2 = [&](double x) { return spec2.quantile(x); };

  const std::size_t n = std::max(spec1.n_grid, spec2.n_grid);
  std::vector<double> grid;
  for (std::size_t k = 0; k < n; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(n - 1));
  if (alpha < 1) grid.push_back(split);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

  ContinuousAllocation out;
  out.alpha = alpha;
  double r1 = b1(0.0), r2 = b2(0.0);
  double p1 = exp4(r1 + r2) - exp4(r2);
  double ap2 = exp4(r2) - 1;  // alpha * P_2, user 2 at its floor
  out.samples.push_back({0.0, r1, p1, r2, ap2 / alpha});
  for (std::size_t k = 1; k < grid.size(); ++k) {
    double n1 = b1(grid[k]), n2 = b2(grid[k]);
    double d1 = n1 - r1, d2 = n2 - r2;
    // Exact integral along the straight path between samples: the increase
    // of 2^{2s} splits in proportion to each user's rate step.
    if (d1 + d2 > 0) {
      double rise = exp4(n1 + n2) - exp4(r1 + r2);
      p1 += rise * d1 / (d1 + d2);
      ap2 += rise * d2 / (d1 + d2);
    }
    r1 = n1;
    r2 = n2;
    out.samples.push_back({grid[k], r1, p1, r2, ap2 / alpha});
  }

  for (const auto& s : out.samples) {
    double target = exp4(s.rate_1 + s.rate_2) - 1;
    double err = std::abs(s.power_1 + alpha * s.power_2 - target) / std::max(1.0, target);
    out.residual = std::max(out.residual, err);
  }
  double acc = 0.0;
  for (std::size_t k = 1; k < grid.size(); ++k) {
    double mid = 0.5 * (grid[k - 1] + grid[k]);
    acc += (grid[k] - grid[k - 1]) * (exp4(b1(mid) + b2(mid)) - 1);
  }
  out.average = acc / alpha;
  return out;
}

namespace {

bool fail(std::string* why, const std::string& msg) {
  if (why) *why = msg;
  return false;
}

bool convex_increasing(const std::vector<std::pair<double, double>>& pts, double tol, const char* who,
                       std::string* why) {
  double last_slope = 0.0;
  for (std::size_t k = 1; k < pts.size(); ++k) {
    auto [ra, pa] = pts[k - 1];
    auto [rb, pb] = pts[k];
    double scale = std::max(1.0, std::abs(pb));
    if (rb < ra || pb < pa - tol * scale) return fail(why, std::string(who) + " curve is not nondecreasing");
    if (rb - ra <= 1e-12) continue;
    double slope = (pb - pa) / (rb - ra);
    if (slope < last_slope - tol * std::max(1.0, slope)) return fail(why, std::string(who) + " curve is not convex");
    last_slope = slope;
  }
  return true;
}

}  // namespace

bool check_continuous(const ContinuousAllocation& a, double tol, std::string* why) {
  std::vector<std::pair<double, double>> c1, c2;
  for (const auto& s : a.samples) {
    double f1 = std::exp2(2 * s.rate_1) - 1, f2 = std::exp2(2 * s.rate_2) - 1;
    if (s.power_1 < f1 - tol * std::max(1.0, f1)) return fail(why, "user 1 below its single-user floor");
    if (a.alpha * s.power_2 < f2 - tol * std::max(1.0, f2)) return fail(why, "user 2 below its single-user floor");
    c1.push_back({s.rate_1, s.power_1});
    c2.push_back({s.rate_2, s.power_2});
  }
  return convex_increasing(c1, tol, "user 1", why) && convex_increasing(c2, tol, "user 2", why);
}

}  // namespace dmac
