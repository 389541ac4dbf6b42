#include "dmac/alloc_unit.hpp"
#include "dmac/baselines.hpp"
#include "dmac/sim.hpp"

#include "golden.hpp"

#include <doctest.h>

using namespace dmac;

namespace {

SimConfig bernoulli_config(std::size_t slots, std::uint64_t seed) {
  DiscreteLaw law({{1, Rational(3, 4)}, {2, Rational(1, 4)}});
  SimConfig sc;
  sc.slots = slots;
  sc.seed = seed;
  sc.table = allocate_fixed(law, law, 1, 1).table;
  sc.users = {SimUser{law}, SimUser{law}};
  return sc;
}

}  // namespace

TEST_CASE("simulated Bernoulli mean matches the analytic 75") {
  SimReport r = run(bernoulli_config(100000, 3));
  CHECK(r.mean == doctest::Approx(75).epsilon(0.01));
  CHECK(std::abs(r.mean - 75) < 5 * r.std_err + 1e-9);
  CHECK(r.outages == 0);
  CHECK(r.delay_violations == 0);
}

TEST_CASE("same seed reproduces the run exactly, other seeds differ") {
  SimConfig sc = bernoulli_config(5000, 42);
  sc.reps = 3;
  sc.trace = true;
  SimReport a = run(sc), b = run(sc);
  CHECK(a == b);
  CHECK(a.trace.size() == 2 * 5000);
  sc.seed = 43;
  CHECK_FALSE(run(sc) == a);
}

TEST_CASE("stream draws are independent of other users and replications") {
  CHECK(stream_uniform(1, 0, 0, 5) == stream_uniform(1, 0, 0, 5));
  CHECK(stream_uniform(1, 0, 0, 5) != stream_uniform(1, 1, 0, 5));
  CHECK(stream_uniform(1, 0, 0, 5) != stream_uniform(1, 0, 1, 5));
  for (std::uint64_t k = 0; k < 1000; ++k) {
    double u = stream_uniform(9, 2, 3, k);
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("zero arrivals cost nothing") {
  SimConfig sc;
  sc.slots = 1000;
  sc.table = allocate_fixed(DiscreteLaw::point(0), DiscreteLaw::point(0), 1, 1).table;
  sc.users = {SimUser{DiscreteLaw::point(0)}, SimUser{DiscreteLaw::point(0)}};
  SimReport r = run(sc);
  CHECK(r.mean == 0);
  CHECK(r.outages == 0);
}

TEST_CASE("joint rules reproduce their analytic averages") {
  SimConfig sc = bernoulli_config(50000, 5);
  RateFadingLaw l(sc.users[0].arrivals, DiscreteLaw::point(1));
  sc.joint = centralized_rule();
  CHECK(run(sc).mean == doctest::Approx(centralized_average(l, l)).epsilon(0.02));
  sc.joint = tdm_rule(0.3);
  CHECK(run(sc).mean == doctest::Approx(tdm_average(l, l, 0.3)).epsilon(0.02));
  CHECK(centralized_average(l, l) < 75);
  CHECK(tdm_average(l, l, 0.3) > 75);
}

TEST_CASE("a tampered table produces counted outages") {
  SimConfig sc = bernoulli_config(2000, 8);
  sc.table->users[0].back().power *= 0.5;
  CHECK(run(sc).outages > 0);
}

TEST_CASE("scheduled users never miss a deadline") {
  DiscreteLaw a = DiscreteLaw::uniform({1, 2, 3});
  DiscreteLaw m = stationary_rate_law(testing::tdma_scheduler(), a);
  SimConfig sc;
  sc.slots = 20000;
  sc.dmax = 2;
  sc.table = allocate_fixed(m, m, 10, 1).table;
  for (int u = 0; u < 2; ++u) {
    SimUser s{a};
    s.scheduler = SchedulerKind::via;
    s.policy = testing::tdma_scheduler();
    sc.users.push_back(s);
  }
  sc.users[0].fading = DiscreteLaw::point(10);
  SimReport r = run(sc);
  CHECK(r.delay_violations == 0);
}

TEST_CASE("derivative-directed users on fading meet every deadline") {
  std::vector<RateFadingLaw> laws{
      RateFadingLaw(DiscreteLaw::uniform({0, 1, 2, 3, 4}), DiscreteLaw::uniform({9, 16})),
      RateFadingLaw(DiscreteLaw::uniform({0, 1, 2, 3, 4}), DiscreteLaw::uniform({1, 4}))};
  SimConfig sc = dd_fading_config(laws, 2);
  sc.slots = 20000;
  SimReport r = run_dd_fading(sc);
  CHECK(r.delay_violations == 0);
  CHECK(r.outages == 0);
}

TEST_CASE("simulation settings are validated") {
  SimConfig sc = bernoulli_config(0, 1);
  CHECK_THROWS_AS(sc.validate(), std::invalid_argument);
  CHECK_THROWS_AS(parse_scheduler("fastest"), std::invalid_argument);
}
