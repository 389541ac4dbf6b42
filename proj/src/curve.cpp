#include "dmac/curve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dmac {

namespace {
constexpr double kRateSlack = 1e-12;
}

RatePowerCurve::RatePowerCurve(std::vector<std::pair<double, double>> knots) : knots_(std::move(knots)) {
  if (knots_.empty() || knots_.front().first != 0.0 || knots_.front().second != 0.0)
    throw std::invalid_argument("rate-power curve must start at (0,0)");
  for (std::size_t k = 1; k < knots_.size(); ++k)
    if (!(knots_[k].first > knots_[k - 1].first))
      throw std::invalid_argument("rate-power curve knots must have increasing rates");
}

std::size_t RatePowerCurve::segment(double rate) const {
  if (rate < -kRateSlack || rate > max_rate() * (1 + kRateSlack) + kRateSlack) {
    std::ostringstream os;
    os << "rate " << rate << " outside curve domain [0, " << max_rate() << "]";
    throw std::out_of_range(os.str());
  }
  auto it = std::upper_bound(knots_.begin(), knots_.end(), rate,
                             [](double r, const auto& k) { return r < k.first; });
  std::size_t k = static_cast<std::size_t>(it - knots_.begin());
  k = k == 0 ? 0 : k - 1;
  return std::min(k, knots_.size() >= 2 ? knots_.size() - 2 : 0);
}

double RatePowerCurve::operator()(double rate) const {
  if (knots_.size() == 1) {
    segment(rate);
    return 0.0;
  }
  std::size_t k = segment(rate);
  const auto& [r0, p0] = knots_[k];
  const auto& [r1, p1] = knots_[k + 1];
  if (rate == r0) return p0;
  if (rate == r1) return p1;
  return p0 + (p1 - p0) * (rate - r0) / (r1 - r0);
}

double RatePowerCurve::right_slope(double rate) const {
  if (knots_.size() == 1) return 0.0;
  std::size_t k = segment(rate);
  return (knots_[k + 1].second - knots_[k].second) / (knots_[k + 1].first - knots_[k].first);
}

double RatePowerCurve::rate_at_slope(double d) const {
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    double s = (knots_[k + 1].second - knots_[k].second) / (knots_[k + 1].first - knots_[k].first);
    if (s > d) return knots_[k].first;
  }
  return max_rate();
}

bool RatePowerCurve::is_convex(double tol, std::string* why) const {
  double last = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < knots_.size(); ++k) {
    double s = (knots_[k + 1].second - knots_[k].second) / (knots_[k + 1].first - knots_[k].first);
    double slack = tol * std::max(1.0, std::abs(s));
    if (s < -slack || s < last - slack) {
      if (why) {
        std::ostringstream os;
        os << "slope " << s << " after " << last << " at rate " << knots_[k].first;
        *why = os.str();
      }
      return false;
    }
    last = s;
  }
  return true;
}

PowerCurve RatePowerCurve::as_function() const {
  return [c = *this](double r) { return c(r); };
}

double FadingPowerCurve::rate_at_slope(double d, double gain) const {
  double lo = 0.0, hi = max_rate();
  if (slope(lo, gain) > d) return 0.0;
  if (slope(hi, gain) <= d) return hi;
  for (int it = 0; it < 200 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
    double mid = 0.5 * (lo + hi);
    (slope(mid, gain) <= d ? lo : hi) = mid;
  }
  return lo;
}

TabulatedFadingCurve::TabulatedFadingCurve(std::map<double, RatePowerCurve> by_gain) : by_gain_(std::move(by_gain)) {
  if (by_gain_.empty()) throw std::invalid_argument("fading curve needs at least one gain");
}

const RatePowerCurve& TabulatedFadingCurve::at(double gain) const {
  auto it = by_gain_.lower_bound(gain * (1 - 1e-12));
  if (it == by_gain_.end() || std::abs(it->first - gain) > 1e-12 * std::max(1.0, gain)) {
    std::ostringstream os;
    os << "no rate-power curve for fading gain " << gain;
    throw std::out_of_range(os.str());
  }
  return it->second;
}

double TabulatedFadingCurve::power(double rate, double gain) const { return at(gain)(rate); }
double TabulatedFadingCurve::slope(double rate, double gain) const { return at(gain).right_slope(rate); }
double TabulatedFadingCurve::rate_at_slope(double d, double gain) const { return at(gain).rate_at_slope(d); }

double TabulatedFadingCurve::max_rate() const {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& [g, c] : by_gain_) m = std::min(m, c.max_rate());
  return m;
}

TdmaFadingCurve::TdmaFadingCurve(double share, double max_rate) : share_(share), max_rate_(max_rate) {
  if (!(share > 0 && share <= 1)) throw std::invalid_argument("time share must lie in (0,1]");
}

double TdmaFadingCurve::power(double rate, double gain) const {
  return share_ * std::expm1(2.0 * rate / share_ * std::log(2.0)) / gain;
}

double TdmaFadingCurve::slope(double rate, double gain) const {
  return 2.0 * std::log(2.0) * std::exp2(2.0 * rate / share_) / gain;
}

}  // namespace dmac
