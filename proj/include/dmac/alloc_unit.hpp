#pragma once

#include "dmac/dist.hpp"

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

namespace dmac {

// (rate b, fading power gain h^2). Gain 0 marks the zero-rate sentinel that
// precedes every user's pair list.
struct RatePair {
  Rational rate;
  Rational gain;
  bool is_sentinel() const { return gain == 0; }
  auto operator<=>(const RatePair& o) const {
    if (rate != o.rate) return rate < o.rate ? std::strong_ordering::less : std::strong_ordering::greater;
    if (gain != o.gain) return gain < o.gain ? std::strong_ordering::less : std::strong_ordering::greater;
    return std::strong_ordering::equal;
  }
  bool operator==(const RatePair& o) const { return rate == o.rate && gain == o.gain; }
};

// One user's lexicographically ordered pairs and their pseudo-CDF heights.
// pairs[0] is the sentinel; cumulative[k] is the height reached after pairs[k].
struct UserLevels {
  std::vector<RatePair> pairs;
  std::vector<Rational> probs;
  std::vector<Rational> cumulative;
  Rational height() const { return cumulative.back(); }
};

struct GridLevel {
  Rational gamma;
  Rational gap;
  std::array<std::size_t, 2> index;  // into UserLevels::pairs
};

struct GammaGrid {
  std::array<RateFadingLaw, 2> laws;
  std::array<UserLevels, 2> users;
  Rational d0;
  // The shorter pseudo-CDF is lifted by d0; the other one is the base user and
  // receives its single-user floor at l_star.
  std::size_t base_user = 1;
  std::vector<GridLevel> levels;
  std::size_t l_star = 0;  // == levels.size() when every rate is zero

  bool swapped() const { return base_user == 0; }
  const RatePair& pair(std::size_t level, std::size_t user) const {
    return users[user].pairs[levels[level].index[user]];
  }
  // Pair heights without the d0 lift, starting at 0.
  std::vector<Rational> raw_levels(std::size_t user) const;
  Rational top() const { return levels.back().gamma; }
};

struct PowerEntry {
  Rational rate;
  Rational gain;
  double power;
};

struct PowerTable {
  std::vector<std::vector<PowerEntry>> users;  // each sorted by (rate, gain)

  std::optional<double> find(std::size_t user, const Rational& rate, const Rational& gain) const;
  std::size_t user_count() const { return users.size(); }
};

struct LevelTrace {
  Rational gamma;
  Rational gap;
  std::vector<RatePair> pairs;
  std::vector<double> received;  // h^2 P per user
};

struct AllocationReport {
  std::vector<RateFadingLaw> laws;
  PowerTable table;
  double achieved = 0.0;
  double lower_bound = 0.0;
  std::vector<LevelTrace> trace;
  bool swapped = false;

  // Highest pair reached by each user and its received power.
  std::vector<RatePair> top_pairs() const;
  std::vector<double> top_received() const;
};

struct OutageAudit {
  enum class Status { pass, violation, missing_entry };
  Status status = Status::pass;
  std::vector<RatePair> tuple;          // offending support tuple
  std::vector<std::size_t> subset;      // user indices of the violated constraint
  double lhs = 0.0, rhs = 0.0;
  std::string message;
  explicit operator bool() const { return status == Status::pass; }
};

// Relative tolerance for equalities between floating powers.
inline constexpr double kPowerTol = 1e-9;

// 2^{2b} - 1
double rate_cost(double b);

GammaGrid build_pseudo_cdf(const RateFadingLaw& law1, const RateFadingLaw& law2);
AllocationReport allocate_dynamic(const GammaGrid& grid);
AllocationReport allocate_fixed(const DiscreteLaw& rate1, const DiscreteLaw& rate2, const Rational& alpha1,
                                const Rational& alpha2);
AllocationReport allocate_l_user(const std::vector<DiscreteLaw>& rates, const std::vector<Rational>& gains);
double lower_bound(const GammaGrid& grid);
OutageAudit verify_outage_free(const PowerTable& table, const std::vector<RateFadingLaw>& laws);
// First subset (user indices) whose received power misses the sum-rate cost
// for the realized rates; empty when the tuple decodes.
std::vector<std::size_t> tuple_outage(const std::vector<double>& rates, const std::vector<double>& received,
                                      double tol = kPowerTol);
double average_sum_power(const PowerTable& table, const std::vector<RateFadingLaw>& laws);

// Per user and per fading gain: powers nondecreasing and with second
// differences (in rate) >= -tol over the assigned rates, (0,0) included.
bool is_monotone_convex(const PowerTable& table, double tol = 1e-9, std::string* why = nullptr);

}  // namespace dmac
