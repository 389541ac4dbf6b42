#include "dmac/alloc_unit.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace dmac {

double rate_cost(double b) { return std::expm1(2.0 * b * std::log(2.0)); }

namespace {

bool close(double a, double b) { return std::abs(a - b) <= kPowerTol * std::max(1.0, std::abs(b)); }

std::string describe(const RatePair& p) {
  std::ostringstream os;
  os << "(rate " << to_string(p.rate) << ", gain " << to_string(p.gain) << ")";
  return os.str();
}

// Received powers h^2 P keyed by pair. The first assignment of a pair wins;
// later derivations must reproduce it.
class ReceivedMap {
 public:
  double at(const RatePair& p) const {
    if (p.rate == 0) return 0.0;
    auto it = map_.find(p);
    if (it == map_.end()) throw std::logic_error("power requested for unassigned pair " + describe(p));
    return it->second;
  }
  bool has(const RatePair& p) const { return map_.count(p) != 0; }
  void assign(const RatePair& p, double v) {
    if (v < 0) {
      if (v < -kPowerTol * std::max(1.0, rate_cost(to_double(p.rate))))
        throw std::logic_error("negative power derived for " + describe(p));
      v = 0.0;
    }
    if (p.rate == 0 && !close(v, 0.0)) throw std::logic_error("nonzero power derived for zero rate " + describe(p));
    if (p.is_sentinel()) return;
    auto [it, fresh] = map_.emplace(p, v);
    if (!fresh && !close(v, it->second)) {
      std::ostringstream os;
      os << "inconsistent re-derivation for " << describe(p) << ": " << v << " vs " << it->second;
      throw std::logic_error(os.str());
    }
  }
  std::vector<PowerEntry> entries() const {
    std::vector<PowerEntry> out;
    for (const auto& [p, r] : map_) out.push_back({p.rate, p.gain, r / to_double(p.gain)});
    return out;
  }

 private:
  std::map<RatePair, double> map_;
};

UserLevels make_levels(const RateFadingLaw& law) {
  UserLevels u;
  u.pairs.push_back({Rational(0), Rational(0)});
  u.probs.push_back(Rational(0));
  u.cumulative.push_back(Rational(0));
  for (const auto& b : law.rate.atoms())
    for (const auto& h : law.fading.atoms()) {
      Rational p = b.prob * h.prob;
      u.pairs.push_back({b.value, h.value});
      u.probs.push_back(p);
      u.cumulative.push_back(u.cumulative.back() + p / h.value);
    }
  return u;
}

double pair_rate(const RatePair& p) { return to_double(p.rate); }

}  // namespace

std::vector<Rational> GammaGrid::raw_levels(std::size_t user) const { return users[user].cumulative; }

std::optional<double> PowerTable::find(std::size_t user, const Rational& rate, const Rational& gain) const {
  if (user >= users.size()) return std::nullopt;
  for (const auto& e : users[user])
    if (e.rate == rate && e.gain == gain) return e.power;
  if (rate == 0) return 0.0;
  return std::nullopt;
}

std::vector<RatePair> AllocationReport::top_pairs() const {
  if (trace.empty()) throw std::logic_error("allocation has no levels");
  return trace.back().pairs;
}

std::vector<double> AllocationReport::top_received() const {
  if (trace.empty()) throw std::logic_error("allocation has no levels");
  return trace.back().received;
}

GammaGrid build_pseudo_cdf(const RateFadingLaw& law1, const RateFadingLaw& law2) {
  GammaGrid g;
  g.laws = {law1, law2};
  for (std::size_t u = 0; u < 2; ++u) {
    if (g.laws[u].fading.min_value() <= 0) throw std::invalid_argument("fading gains must be strictly positive");
    g.users[u] = make_levels(g.laws[u]);
  }
  Rational h1 = g.users[0].height(), h2 = g.users[1].height();
  g.base_user = h2 >= h1 ? 1 : 0;
  std::size_t lifted = 1 - g.base_user;
  g.d0 = g.base_user == 1 ? h2 - h1 : h1 - h2;

  std::array<Rational, 2> lift;
  lift[g.base_user] = 0;
  lift[lifted] = g.d0;
  std::array<std::size_t, 2> i{0, 0};
  Rational prev = 0;
  // Each level takes, per user, the first pair whose lifted height reaches it.
  for (;;) {
    std::array<Rational, 2> chi{g.users[0].cumulative[i[0]] + lift[0], g.users[1].cumulative[i[1]] + lift[1]};
    Rational level = std::min(chi[0], chi[1]);
    g.levels.push_back({level, level - prev, i});
    prev = level;
    bool advanced = false;
    for (std::size_t u = 0; u < 2; ++u)
      if (chi[u] == level && i[u] + 1 < g.users[u].pairs.size()) {
        ++i[u];
        advanced = true;
      }
    if (!advanced) break;
  }
  g.l_star = g.levels.size();
  for (std::size_t l = 0; l < g.levels.size(); ++l)
    if (g.pair(l, 0).rate > 0 || g.pair(l, 1).rate > 0) {
      g.l_star = l;
      break;
    }
  return g;
}

double lower_bound(const GammaGrid& grid) {
  double acc = 0.0;
  for (std::size_t l = 0; l < grid.levels.size(); ++l) {
    if (grid.levels[l].gap == 0) continue;
    acc += rate_cost(pair_rate(grid.pair(l, 0)) + pair_rate(grid.pair(l, 1))) * to_double(grid.levels[l].gap);
  }
  return acc;
}

AllocationReport allocate_dynamic(const GammaGrid& grid) {
  const std::size_t base = grid.base_user, other = 1 - base;
  std::array<ReceivedMap, 2> R;
  AllocationReport rep;
  rep.laws = {grid.laws[0], grid.laws[1]};
  rep.swapped = grid.swapped();

  for (std::size_t l = 0; l < grid.levels.size(); ++l) {
    std::array<RatePair, 2> p{grid.pair(l, 0), grid.pair(l, 1)};
    double target = rate_cost(pair_rate(p[0]) + pair_rate(p[1]));
    if (l < grid.l_star) {
      R[0].assign(p[0], 0.0);
      R[1].assign(p[1], 0.0);
    } else if (l == grid.l_star) {
      R[base].assign(p[base], rate_cost(pair_rate(p[base])));
      R[other].assign(p[other], target - R[base].at(p[base]));
    } else {
      const RatePair& q_other = grid.pair(l - 1, other);
      R[base].assign(p[base], rate_cost(pair_rate(q_other) + pair_rate(p[base])) - R[other].at(q_other));
      R[other].assign(p[other], target - R[base].at(p[base]));
    }
    std::vector<double> rec{R[0].at(p[0]), R[1].at(p[1])};
    if (l >= grid.l_star && !close(rec[0] + rec[1], target))
      throw std::logic_error("level-sum equality broken at level " + std::to_string(l));
    rep.trace.push_back({grid.levels[l].gamma, grid.levels[l].gap, {p[0], p[1]}, rec});
  }
  rep.table.users = {R[0].entries(), R[1].entries()};
  rep.lower_bound = lower_bound(grid);
  rep.achieved = average_sum_power(rep.table, rep.laws);
  return rep;
}

namespace {

void swap_users(AllocationReport& rep) {
  std::swap(rep.laws[0], rep.laws[1]);
  std::swap(rep.table.users[0], rep.table.users[1]);
  for (auto& t : rep.trace) {
    std::swap(t.pairs[0], t.pairs[1]);
    std::swap(t.received[0], t.received[1]);
  }
  rep.swapped = !rep.swapped;
}

}  // namespace

AllocationReport allocate_fixed(const DiscreteLaw& rate1, const DiscreteLaw& rate2, const Rational& alpha1,
                                const Rational& alpha2) {
  if (alpha1 <= 0 || alpha2 <= 0) throw std::invalid_argument("channel gains must be positive");
  if (alpha1 < alpha2) {
    AllocationReport rep = allocate_fixed(rate2, rate1, alpha2, alpha1);
    swap_users(rep);
    return rep;
  }
  const Rational alpha = alpha2 / alpha1, abar = 1 - alpha;
  const double a2 = to_double(alpha2);
  auto key1 = [&](const Rational& b) { return RatePair{b, alpha1}; };
  auto key2 = [&](const Rational& b) { return RatePair{b, alpha2}; };
  ReceivedMap R1, R2;
  double bound = 0.0;

  // Quantiles x <= abar of user 2 run at the single-user floor.
  {
    Rational b0 = rate2.inverse_cdf(Rational(0));
    R2.assign(key2(b0), rate_cost(to_double(b0)));
    Rational lo = 0;
    for (const auto& a : rate2.atoms()) {
      Rational hi = lo + a.prob;
      if (a.prob > 0 && lo < abar) {
        R2.assign(key2(a.value), rate_cost(to_double(a.value)));
        bound += rate_cost(to_double(a.value)) * to_double(std::min(hi, abar) - lo);
      }
      lo = hi;
    }
  }

  std::set<Rational> levels{Rational(0)};
  for (const auto& c : rate2.cumulative())
    if (c > 0 && c >= abar) levels.insert(c - abar);
  for (const auto& c : rate1.cumulative())
    if (c > 0) levels.insert(alpha * c);
  std::vector<Rational> gamma(levels.begin(), levels.end());

  AllocationReport rep;
  rep.laws = {RateFadingLaw::fixed(rate1, alpha1), RateFadingLaw::fixed(rate2, alpha2)};
  Rational prev = 0;
  for (std::size_t i = 0; i < gamma.size(); ++i) {
    Rational u = rate1.inverse_cdf(gamma[i] / alpha);
    Rational v = rate2.inverse_cdf(gamma[i] + abar);
    double su = to_double(u), sv = to_double(v);
    R1.assign(key1(u), rate_cost(su + sv) - R2.at(key2(v)));
    if (i + 1 < gamma.size()) {
      Rational vn = rate2.inverse_cdf(gamma[i + 1] + abar);
      R2.assign(key2(vn), rate_cost(to_double(vn) + su) - R1.at(key1(u)));
    }
    bound += rate_cost(su + sv) * to_double(gamma[i] - prev);
    rep.trace.push_back({gamma[i], gamma[i] - prev, {key1(u), key2(v)}, {R1.at(key1(u)), R2.at(key2(v))}});
    prev = gamma[i];
  }
  rep.table.users = {R1.entries(), R2.entries()};
  rep.lower_bound = bound / a2;
  rep.achieved = average_sum_power(rep.table, rep.laws);
  return rep;
}

AllocationReport allocate_l_user(const std::vector<DiscreteLaw>& rates, const std::vector<Rational>& gains) {
  const std::size_t L = rates.size();
  if (L < 2) throw std::invalid_argument("at least two users required");
  if (gains.size() != L) throw std::invalid_argument("one gain per user required");
  for (std::size_t i = 0; i < L; ++i) {
    if (gains[i] <= 0) throw std::invalid_argument("channel gains must be positive");
    if (i > 0 && gains[i] > gains[i - 1]) throw std::invalid_argument("gains must be sorted in descending order");
  }
  std::vector<DiscreteLaw> psi;
  std::set<Rational> levels{Rational(0)};
  for (std::size_t i = 0; i < L; ++i) {
    psi.push_back(rates[i].shrink_toward_zero(gains[L - 1] / gains[i]));
    for (const auto& c : psi.back().cumulative())
      if (c > 0) levels.insert(c);
  }
  std::vector<Rational> gamma(levels.begin(), levels.end());

  std::vector<ReceivedMap> R(L);
  auto key = [&](std::size_t i, const Rational& b) { return RatePair{b, gains[i]}; };
  AllocationReport rep;
  for (std::size_t i = 0; i < L; ++i) rep.laws.push_back(RateFadingLaw::fixed(rates[i], gains[i]));

  // Levels carry mass at the shrunk-law quantiles. Where user i's own
  // quantile b_i((gamma - 1 + c) / c), c = alpha_L / alpha_i, differs (at
  // gamma = 1 - c it is b_i(0), the first positive atom) a zero-width step
  // follows so that rate is reached in the same order as the two-user rule.
  struct Step {
    Rational gamma, gap;
    std::vector<Rational> rates;
  };
  std::vector<Step> steps;
  Rational prev = 0;
  for (const auto& g : gamma) {
    Step mass{g, g - prev, {}}, own{g, 0, {}};
    for (std::size_t i = 0; i < L; ++i) {
      const Rational c = gains[L - 1] / gains[i];
      mass.rates.push_back(psi[i].inverse_cdf(g));
      own.rates.push_back(g < 1 - c ? Rational(0) : rates[i].inverse_cdf((g - 1 + c) / c));
    }
    bool differs = own.rates != mass.rates;
    steps.push_back(std::move(mass));
    if (differs) steps.push_back(std::move(own));
    prev = g;
  }

  std::vector<Rational> prev_rates(L);
  bool started = false;
  double bound = 0.0;
  for (std::size_t l = 0; l < steps.size(); ++l) {
    const std::vector<Rational>& cur = steps[l].rates;
    double total = 0.0;
    bool positive = false;
    for (std::size_t i = 0; i < L; ++i) {
      total += to_double(cur[i]);
      positive = positive || cur[i] > 0;
    }
    if (!started && !positive) {
      for (std::size_t i = 0; i < L; ++i) R[i].assign(key(i, cur[i]), 0.0);
    } else if (!started) {
      // Successive-decoding corner: the weakest user sits at its floor.
      double tail = 0.0;
      for (std::size_t i = L; i-- > 0;) {
        double with = tail + to_double(cur[i]);
        R[i].assign(key(i, cur[i]), rate_cost(with) - rate_cost(tail));
        tail = with;
      }
      started = true;
    } else {
      for (std::size_t i = L; i-- > 0;) {
        double s = 0.0, known = 0.0;
        for (std::size_t j = 0; j < i; ++j) {
          s += to_double(prev_rates[j]);
          known += R[j].at(key(j, prev_rates[j]));
        }
        for (std::size_t j = i; j < L; ++j) s += to_double(cur[j]);
        for (std::size_t j = i + 1; j < L; ++j) known += R[j].at(key(j, cur[j]));
        R[i].assign(key(i, cur[i]), rate_cost(s) - known);
      }
    }
    LevelTrace t{steps[l].gamma, steps[l].gap, {}, {}};
    double sum = 0.0;
    for (std::size_t i = 0; i < L; ++i) {
      t.pairs.push_back(key(i, cur[i]));
      t.received.push_back(R[i].at(key(i, cur[i])));
      sum += t.received.back();
    }
    if (started && !close(sum, rate_cost(total)))
      throw std::logic_error("level-sum equality broken at level " + std::to_string(l));
    bound += rate_cost(total) * to_double(steps[l].gap);
    rep.trace.push_back(std::move(t));
    prev_rates = cur;
  }
  for (std::size_t i = 0; i < L; ++i) rep.table.users.push_back(R[i].entries());
  rep.lower_bound = bound / to_double(gains[L - 1]);
  rep.achieved = average_sum_power(rep.table, rep.laws);
  return rep;
}

namespace {

struct SupportPoint {
  RatePair pair;
  double received;
};

}  // namespace

OutageAudit verify_outage_free(const PowerTable& table, const std::vector<RateFadingLaw>& laws) {
  OutageAudit audit;
  const std::size_t L = laws.size();
  if (table.user_count() != L) {
    audit.status = OutageAudit::Status::missing_entry;
    audit.message = "table and laws disagree on the number of users";
    return audit;
  }
  std::vector<std::vector<SupportPoint>> support(L);
  for (std::size_t i = 0; i < L; ++i)
    for (const auto& b : laws[i].rate.atoms())
      for (const auto& h : laws[i].fading.atoms()) {
        if (b.prob == 0 || h.prob == 0) continue;
        auto p = table.find(i, b.value, h.value);
        if (!p) {
          audit.status = OutageAudit::Status::missing_entry;
          audit.tuple = {{b.value, h.value}};
          audit.subset = {i};
          audit.message = "no power for user " + std::to_string(i + 1) + " at " + describe({b.value, h.value});
          return audit;
        }
        support[i].push_back({{b.value, h.value}, to_double(h.value) * *p});
      }
  std::vector<std::size_t> idx(L, 0);
  for (;;) {
    for (std::size_t mask = 1; mask < (std::size_t{1} << L); ++mask) {
      double lhs = 0.0, bits = 0.0;
      for (std::size_t i = 0; i < L; ++i)
        if (mask >> i & 1) {
          lhs += support[i][idx[i]].received;
          bits += pair_rate(support[i][idx[i]].pair);
        }
      double rhs = rate_cost(bits);
      if (lhs < rhs - kPowerTol * std::max(1.0, rhs)) {
        audit.status = OutageAudit::Status::violation;
        for (std::size_t i = 0; i < L; ++i) audit.tuple.push_back(support[i][idx[i]].pair);
        for (std::size_t i = 0; i < L; ++i)
          if (mask >> i & 1) audit.subset.push_back(i);
        audit.lhs = lhs;
        audit.rhs = rhs;
        std::ostringstream os;
        os << "subset {";
        for (std::size_t k = 0; k < audit.subset.size(); ++k) os << (k ? "," : "") << audit.subset[k] + 1;
        os << "} receives " << lhs << " < " << rhs;
        audit.message = os.str();
        return audit;
      }
    }
    std::size_t k = 0;
    while (k < L && ++idx[k] == support[k].size()) idx[k++] = 0;
    if (k == L) break;
  }
  return audit;
}

std::vector<std::size_t> tuple_outage(const std::vector<double>& rates, const std::vector<double>& received,
                                      double tol) {
  const std::size_t L = rates.size();
  if (received.size() != L) throw std::invalid_argument("rates and received powers differ in length");
  for (std::size_t mask = 1; mask < (std::size_t{1} << L); ++mask) {
    double lhs = 0.0, bits = 0.0;
    for (std::size_t i = 0; i < L; ++i)
      if (mask >> i & 1) {
        lhs += received[i];
        bits += rates[i];
      }
    double rhs = rate_cost(bits);
    if (lhs < rhs - tol * std::max(1.0, rhs)) {
      std::vector<std::size_t> subset;
      for (std::size_t i = 0; i < L; ++i)
        if (mask >> i & 1) subset.push_back(i);
      return subset;
    }
  }
  return {};
}

double average_sum_power(const PowerTable& table, const std::vector<RateFadingLaw>& laws) {
  double acc = 0.0;
  for (std::size_t i = 0; i < laws.size(); ++i)
    for (const auto& b : laws[i].rate.atoms())
      for (const auto& h : laws[i].fading.atoms()) {
        Rational w = b.prob * h.prob;
        if (w == 0) continue;
        auto p = table.find(i, b.value, h.value);
        if (!p)
          throw std::invalid_argument("no power for user " + std::to_string(i + 1) + " at " +
                                      describe({b.value, h.value}));
        acc += to_double(w) * *p;
      }
  return acc;
}

bool is_monotone_convex(const PowerTable& table, double tol, std::string* why) {
  for (std::size_t u = 0; u < table.user_count(); ++u) {
    std::map<Rational, std::vector<std::pair<double, double>>> by_gain;
    for (const auto& e : table.users[u]) by_gain[e.gain].push_back({to_double(e.rate), e.power});
    for (auto& [gain, pts] : by_gain) {
      if (pts.front().first != 0.0) pts.insert(pts.begin(), {0.0, 0.0});
      double last_slope = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 1; k < pts.size(); ++k) {
        double slope = (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
        double scale = tol * std::max(1.0, std::abs(slope));
        if (slope < -scale || slope < last_slope - scale) {
          if (why)
            *why = "user " + std::to_string(u + 1) + ", gain " + to_string(gain) + ": slope " +
                   std::to_string(slope) + " after " + std::to_string(last_slope) + " at rate " +
                   std::to_string(pts[k].first);
          return false;
        }
        last_slope = slope;
      }
    }
  }
  return true;
}

}  // namespace dmac
