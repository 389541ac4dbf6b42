#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace dmac {

// Rate -> transmit power, as consumed by the single-user scheduler.
using PowerCurve = std::function<double(double)>;

// Piecewise-linear curve through (0,0) and increasing rate knots.
class RatePowerCurve {
 public:
  RatePowerCurve() = default;
  explicit RatePowerCurve(std::vector<std::pair<double, double>> knots);

  double operator()(double rate) const;
  // Slope of the segment starting at rate; the last segment at max_rate().
  double right_slope(double rate) const;
  // sup{r : right_slope(r) <= d}, clamped to [0, max_rate()]; lands on a knot.
  double rate_at_slope(double d) const;
  double max_rate() const { return knots_.back().first; }
  const std::vector<std::pair<double, double>>& knots() const { return knots_; }
  bool is_convex(double tol = 1e-9, std::string* why = nullptr) const;
  PowerCurve as_function() const;

 private:
  std::size_t segment(double rate) const;
  std::vector<std::pair<double, double>> knots_;
};

// (rate, fading gain h^2) -> transmit power.
class FadingPowerCurve {
 public:
  virtual ~FadingPowerCurve() = default;
  virtual double power(double rate, double gain) const = 0;
  virtual double slope(double rate, double gain) const = 0;
  virtual double max_rate() const = 0;
  // sup{r in [0, max_rate] : slope(r, gain) <= d}; bisection on the convex curve.
  virtual double rate_at_slope(double d, double gain) const;
};

class TabulatedFadingCurve final : public FadingPowerCurve {
 public:
  explicit TabulatedFadingCurve(std::map<double, RatePowerCurve> by_gain);
  double power(double rate, double gain) const override;
  double slope(double rate, double gain) const override;
  double max_rate() const override;
  double rate_at_slope(double d, double gain) const override;
  const RatePowerCurve& at(double gain) const;
  const std::map<double, RatePowerCurve>& curves() const { return by_gain_; }

 private:
  std::map<double, RatePowerCurve> by_gain_;
};

// share * (2^{2r/share} - 1) / gain
class TdmaFadingCurve final : public FadingPowerCurve {
 public:
  TdmaFadingCurve(double share, double max_rate);
  double power(double rate, double gain) const override;
  double slope(double rate, double gain) const override;
  double max_rate() const override { return max_rate_; }

 private:
  double share_, max_rate_;
};

}  // namespace dmac
