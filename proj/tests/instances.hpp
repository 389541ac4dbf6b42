#pragma once

#include "dmac/dist.hpp"

#include <algorithm>
#include <array>
#include <random>
#include <vector>

namespace dmac::testing {

// Law on a random subset (size 1..max_atoms) of `pool`, positive integer
// weights normalized exactly.
inline DiscreteLaw random_law(std::mt19937_64& rng, const std::vector<Rational>& pool, std::size_t max_atoms) {
  std::vector<Rational> vals = pool;
  std::shuffle(vals.begin(), vals.end(), rng);
  std::size_t n = std::uniform_int_distribution<std::size_t>(1, std::min(max_atoms, pool.size()))(rng);
  vals.resize(n);
  std::sort(vals.begin(), vals.end());
  std::vector<long> w(n);
  long total = 0;
  for (auto& x : w) total += x = std::uniform_int_distribution<long>(1, 9)(rng);
  std::vector<Atom> atoms;
  for (std::size_t k = 0; k < n; ++k) atoms.push_back({vals[k], Rational(w[k], total)});
  return DiscreteLaw(std::move(atoms));
}

inline std::vector<Rational> rate_pool() {
  return {Rational(0), Rational(1, 2), Rational(1), Rational(3, 2), Rational(2), Rational(5, 2), Rational(3)};
}

inline std::vector<Rational> gain_pool() {
  return {Rational(1, 4), Rational(1, 2), Rational(1), Rational(2), Rational(3), Rational(4), Rational(5)};
}

// Two users, at most 6 rates and 4 fading values each.
inline std::vector<RateFadingLaw> random_instance(std::mt19937_64& rng) {
  std::vector<RateFadingLaw> laws;
  for (int u = 0; u < 2; ++u) laws.emplace_back(random_law(rng, rate_pool(), 6), random_law(rng, gain_pool(), 4));
  return laws;
}

// Integer arrivals for D_max > 1 runs at steps 1, 1/2, 1/4.
struct DelayInstance {
  std::vector<DiscreteLaw> arrivals;
  std::array<Rational, 2> gains;
};

inline DelayInstance random_delay_instance(std::mt19937_64& rng) {
  const std::vector<Rational> pool{Rational(0), Rational(1), Rational(2), Rational(3)};
  const std::vector<Rational> gains{Rational(1, 2), Rational(1), Rational(2), Rational(5), Rational(10)};
  DelayInstance d;
  for (int u = 0; u < 2; ++u) {
    DiscreteLaw law;
    do law = random_law(rng, pool, 3);
    while (law.max_support() == 0);
    d.arrivals.push_back(law);
    d.gains[u] = gains[std::uniform_int_distribution<std::size_t>(0, gains.size() - 1)(rng)];
  }
  return d;
}

}  // namespace dmac::testing
