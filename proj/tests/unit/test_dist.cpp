#include "dmac/dist.hpp"

#include "instances.hpp"
#include "oracle.hpp"

#include <doctest.h>

using namespace dmac;

TEST_CASE("ceiling quantile oracle agrees with inverse_cdf on random laws") {
  std::mt19937_64 rng(11);
  for (int k = 0; k < 200; ++k) {
    DiscreteLaw law = testing::random_law(rng, testing::rate_pool(), 6);
    for (int n = 0; n <= 48; ++n) {
      Rational x(n, 48);
      CHECK(law.inverse_cdf(x) == testing::ceiling_quantile(law.atoms(), x));
    }
    for (const auto& c : law.cumulative()) CHECK(law.inverse_cdf(c) == testing::ceiling_quantile(law.atoms(), c));
  }
}

TEST_CASE("inverse cdf takes the smallest value reaching the level") {
  DiscreteLaw law({{1, Rational(1, 4)}, {2, Rational(3, 4)}});
  CHECK(law.inverse_cdf(0) == 1);
  CHECK(law.inverse_cdf(Rational(1, 4)) == 1);
  CHECK(law.inverse_cdf(Rational(26, 100)) == 2);
  CHECK(law.inverse_cdf(1) == 2);
  CHECK_THROWS_AS(law.inverse_cdf(Rational(5, 4)), std::domain_error);
}

TEST_CASE("zero-probability atoms are skipped by the quantile at zero") {
  DiscreteLaw law({{0, 0}, {3, 1}});
  CHECK(law.inverse_cdf(0) == 3);
  CHECK(law.max_support() == 3);
}

TEST_CASE("law construction rejects malformed input") {
  CHECK_THROWS_AS(DiscreteLaw(std::vector<Atom>{}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteLaw({{1, Rational(1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteLaw({{2, Rational(1, 2)}, {1, Rational(1, 2)}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteLaw({{-1, 1}}), std::invalid_argument);
  CHECK_THROWS_AS(DiscreteLaw::uniform({}), std::invalid_argument);
  CHECK_THROWS_AS(RateFadingLaw(DiscreteLaw::point(1), DiscreteLaw::point(0)), std::invalid_argument);
}

TEST_CASE("truncated geometric masses and mean") {
  DiscreteLaw g = DiscreteLaw::truncated_geometric(Rational(1, 2), 3);
  // p (1-p)^(k-1) / (1 - (1-p)^n) for k = 1..3 at values 0..2
  CHECK(g.atoms()[0].prob == Rational(4, 7));
  CHECK(g.atoms()[1].prob == Rational(2, 7));
  CHECK(g.atoms()[2].prob == Rational(1, 7));
  CHECK(g.mean() == Rational(4, 7));
  CHECK(DiscreteLaw::truncated_geometric(1, 5).cdf(0) == 1);
}

TEST_CASE("shrinking toward zero preserves total mass") {
  DiscreteLaw law({{1, Rational(1, 3)}, {2, Rational(2, 3)}});
  DiscreteLaw s = law.shrink_toward_zero(Rational(1, 4));
  CHECK(s.cdf(0) == Rational(3, 4));
  CHECK(s.cdf(1) == Rational(3, 4) + Rational(1, 12));
  CHECK(s.mean() == law.mean() / 4);
}

TEST_CASE("rational literals parse exactly") {
  CHECK(parse_rational("3/12") == Rational(1, 4));
  CHECK(parse_rational("0.125") == Rational(1, 8));
  CHECK(parse_rational("7") == 7);
  CHECK(snap(1.0 / 3.0) == Rational(1, 3));
  CHECK_THROWS_AS(parse_rational("1/0"), std::invalid_argument);
  CHECK_THROWS_AS(parse_rational("x"), std::invalid_argument);
  CHECK(to_string(Rational(-2, 6)) == "-1/3");
}
