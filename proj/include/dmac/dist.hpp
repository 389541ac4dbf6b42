#pragma once

#include "dmac/rational.hpp"

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace dmac {

struct Atom {
  Rational value;
  Rational prob;
};

// Finite law on nonnegative rationals. Values strictly increasing, masses sum
// to exactly 1. Zero-mass atoms are kept: they hold ordering positions.
class DiscreteLaw {
 public:
  DiscreteLaw() = default;
  explicit DiscreteLaw(std::vector<Atom> atoms);

  // Real-valued entry point; each coordinate is snapped to a rational.
  static DiscreteLaw from_doubles(const std::vector<std::pair<double, double>>& atoms);
  static DiscreteLaw point(const Rational& v);
  static DiscreteLaw uniform(const std::vector<Rational>& values);
  // Pr(B = k - 1) = p (1 - p)^(k-1) / (1 - (1 - p)^n), k = 1..n.
  static DiscreteLaw truncated_geometric(const Rational& p, int n = 5);

  const std::vector<Atom>& atoms() const { return atoms_; }
  std::size_t size() const { return atoms_.size(); }
  bool empty() const { return atoms_.empty(); }

  Rational cdf(const Rational& b) const;
  Rational inverse_cdf(const Rational& x) const;

  // Cumulative masses c_0 = 0, c_1, ..., c_K = 1 aligned with atoms().
  std::vector<Rational> cumulative() const;

  template <class F>
  double expected_value(F&& f) const {
    double acc = 0.0;
    for (const auto& a : atoms_)
      if (a.prob != 0) acc += to_double(a.prob) * f(to_double(a.value));
    return acc;
  }
  Rational mean() const;

  const Rational& min_value() const;
  const Rational& max_value() const;
  // Largest value carrying positive mass.
  const Rational& max_support() const;

  // Mass 1 - c at zero, remaining atoms scaled by c (0 < c <= 1).
  DiscreteLaw shrink_toward_zero(const Rational& c) const;
  DiscreteLaw scaled_values(const Rational& k) const;

  bool operator==(const DiscreteLaw& o) const;

 private:
  std::vector<Atom> atoms_;
};

// Independent (rate, fading power gain) pair law.
struct RateFadingLaw {
  DiscreteLaw rate;
  DiscreteLaw fading;

  RateFadingLaw() = default;
  RateFadingLaw(DiscreteLaw r, DiscreteLaw f);
  static RateFadingLaw fixed(DiscreteLaw r, const Rational& gain);
};

// entries[d] holds bits that must leave within d + 1 more slots.
using QueueState = std::vector<double>;

}  // namespace dmac
