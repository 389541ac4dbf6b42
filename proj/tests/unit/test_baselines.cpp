#include "dmac/alloc_unit.hpp"
#include "dmac/baselines.hpp"

#include "instances.hpp"

#include <doctest.h>

using namespace dmac;

TEST_CASE("centralized corner puts the weaker user at its floor") {
  auto [p1, p2] = centralized_power(1, 1, 1, 1);
  CHECK(p2 == doctest::Approx(3));
  CHECK(p1 == doctest::Approx(12));
  auto [q1, q2] = centralized_power(1, 1, 1, 4);
  CHECK(q1 == doctest::Approx(3));
  CHECK(q2 == doctest::Approx(3));
}

TEST_CASE("equal-share TDMA curve values") {
  CHECK(stdm_curve(1.0)(0) == 0);
  CHECK(stdm_curve(1.0)(1) == doctest::Approx(7.5));
  CHECK(stdm_curve(2.0, 1.0)(1) == doctest::Approx(1.5));
}

TEST_CASE("symmetric users share time equally") {
  RateFadingLaw l(DiscreteLaw({{1, Rational(1, 2)}, {2, Rational(1, 2)}}), DiscreteLaw::point(1));
  GtdmResult r = gtdm_optimize(l, l);
  CHECK(r.tau == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(r.average == doctest::Approx(tdm_average(l, l, 0.5)));
}

TEST_CASE("scheme ordering on random instances") {
  std::mt19937_64 rng(23);
  for (int k = 0; k < 100; ++k) {
    auto inst = testing::random_instance(rng);
    double c = centralized_average(inst[0], inst[1]);
    double d = allocate_dynamic(build_pseudo_cdf(inst[0], inst[1])).achieved;
    double g = gtdm_optimize(inst[0], inst[1]).average;
    double s = tdm_average(inst[0], inst[1], 0.5);
    CHECK(c <= d + 1e-9 * d);
    CHECK(d <= g + 1e-9 * g);
    CHECK(g <= s + 1e-9 * s);
  }
}
