#include "dmac/iteropt.hpp"

#include "golden.hpp"
#include "instances.hpp"

#include <doctest.h>

using namespace dmac;

namespace {
const DiscreteLaw kUniform123 = DiscreteLaw::uniform({1, 2, 3});
}

TEST_CASE("rate-power curve from the TDMA-designed schedulers") {
  DiscreteLaw m = stationary_rate_law(testing::tdma_scheduler(), kUniform123);
  RatePowerCurve c = rate_power_curve(allocate_fixed(m, m, 10, 1), 0, 6.0);
  const double want[] = {19.2, 96, 403.2, 1632};
  for (int r = 1; r <= 4; ++r) CHECK(c(r) == doctest::Approx(want[r - 1]).epsilon(0.01));
  CHECK(c.is_convex());
}

TEST_CASE("both refined matrices share the TDMA stationary law and cost") {
  // The expected refined matrix differs only in a state whose choice leaves
  // the rate law unchanged, so the allocation cannot tell them apart.
  DiscreteLaw a = stationary_rate_law(testing::tdma_scheduler(), kUniform123);
  DiscreteLaw b = stationary_rate_law(testing::refined_scheduler_1(), kUniform123);
  CHECK(a == b);
  RatePowerCurve c = rate_power_curve(allocate_fixed(a, a, 10, 1), 0, 6.0);
  CHECK(policy_average_cost(testing::tdma_scheduler(), c.as_function(), kUniform123) ==
        doctest::Approx(policy_average_cost(testing::refined_scheduler_1(), c.as_function(), kUniform123)));
}

TEST_CASE("curve below the top assigned rate is rejected") {
  DiscreteLaw law({{1, Rational(1, 2)}, {3, Rational(1, 2)}});
  CHECK_THROWS_AS(rate_power_curve(allocate_fixed(law, law, 1, 1), 0, 2.0), std::invalid_argument);
}

TEST_CASE("unit delay is a single allocation") {
  DiscreteLaw law({{1, Rational(3, 4)}, {2, Rational(1, 4)}});
  IterOptTrace tr = iteropt({law, law}, {Rational(1), Rational(1)}, 1);
  CHECK(tr.iterations() == 0);
  CHECK(tr.final_step().average == doctest::Approx(75));
}

TEST_CASE("symmetric users get identical schedulers") {
  IterOptConfig cfg;
  cfg.init = IterInit::tdma;
  IterOptTrace tr = iteropt({kUniform123, kUniform123}, {Rational(1), Rational(1)}, 2, cfg);
  for (const auto& s : tr.steps) CHECK(s.schedulers[0] == s.schedulers[1]);
}

TEST_CASE("refinement never increases the average sum-power") {
  std::mt19937_64 rng(17);
  for (int k = 0; k < 15; ++k) {
    auto inst = testing::random_delay_instance(rng);
    for (IterInit init : {IterInit::tdma, IterInit::unitdelay}) {
      IterOptConfig cfg;
      cfg.init = init;
      cfg.vi.delta = Rational(1, 2);
      IterOptTrace tr = iteropt(inst.arrivals, inst.gains, 2, cfg);
      for (std::size_t i = 1; i < tr.steps.size(); ++i)
        CHECK(tr.steps[i].average <= tr.steps[i - 1].average * (1 + 1e-9) + 1e-12);
      CHECK_FALSE(tr.halt_reason.empty());
    }
  }
}

TEST_CASE("refinement from the TDMA start beats the unit-delay allocation") {
  IterOptConfig cfg;
  cfg.init = IterInit::tdma;
  cfg.vi.delta = Rational(1, 2);
  DiscreteLaw a = DiscreteLaw::uniform({1, 2, 3});
  double d2 = iteropt({a, a}, {Rational(10), Rational(1)}, 2, cfg).final_step().average;
  double d1 = iteropt({a, a}, {Rational(10), Rational(1)}, 1).final_step().average;
  CHECK(d2 < d1);
}
