#include <cmath>

#include "aoi/lagrange.hpp"
#include "doctest.h"

using namespace aoi;

namespace {

SensorConfig table_sensor(double budget) {
  return make_sensor_config(5, 3, 0, 1.0, budget);
}

// constant steps keep |dy| at eta * |cost - budget| and can oscillate across
// a breakpoint forever; the 1/i decay always meets the stop rule eventually
SolverSettings decaying_steps() {
  SolverSettings st;
  st.eta_decay = true;
  return st;
}

}  // namespace

TEST_SUITE("cmdp-lagrange") {

TEST_CASE("mixing parameter interpolates the bracket onto the budget") {
  CHECK(mixing_parameter(1.2, 0.8, 1.0) == doctest::Approx(0.5));
  CHECK(mixing_parameter(2.0, 0.0, 0.5) == doctest::Approx(0.25));
  double theta = mixing_parameter(1.7, 0.3, 1.0);
  CHECK(theta * 1.7 + (1 - theta) * 0.3 == doctest::Approx(1.0));
  CHECK_THROWS_AS(mixing_parameter(0.9, 0.8, 1.0), InvalidBracketError);
  CHECK_THROWS_AS(mixing_parameter(1.2, 1.0, 1.0), InvalidBracketError);
  CHECK_THROWS_AS(mixing_parameter(1.0, 1.0, 1.0), InvalidBracketError);
  CHECK_THROWS_AS(mixing_parameter(0.8, 1.2, 1.0), InvalidBracketError);
}

TEST_CASE("solver settings are validated") {
  SystemParams p = default_system_params();
  SolverSettings st;
  st.eta = 0.0;
  CHECK_THROWS_AS(solve_cmdp(p, table_sensor(1.0), st), ConfigError);
  st = {};
  st.epsilon = -1.0;
  CHECK_THROWS_AS(solve_cmdp(p, table_sensor(1.0), st), ConfigError);
  st = {};
  st.i_stop = 0;
  CHECK_THROWS_AS(solve_cmdp(p, table_sensor(1.0), st), ConfigError);
}

TEST_CASE("budgets at or below the sampling floor are rejected up front") {
  SystemParams p = default_system_params();
  // floor = sampling_cost * rate = 1.0 at full rate
  CHECK_THROWS_AS(solve_cmdp(p, make_sensor_config(10, 3, 0, 1.0, 1.0), {}),
                  NoFeasiblePolicyError);
  CHECK_THROWS_AS(solve_cmdp(p, table_sensor(0.5), {}), NoFeasiblePolicyError);
  CHECK_THROWS_AS(solve_cmdp(p, table_sensor(0.49), {}), NoFeasiblePolicyError);
}

TEST_CASE("a generous budget returns the unconstrained optimum alone") {
  SystemParams p = default_system_params();
  MixedPolicy mp = solve_cmdp(p, table_sensor(100.0), {});
  CHECK(mp.degenerate);
  CHECK(mp.theta == 1.0);
  CHECK(mp.avg_cost < 100.0);
  CHECK(mp.avg_cost == mp.cost_above);
  CHECK(mp.avg_cost == mp.cost_below);
  CHECK(mp.avg_aoi == mp.aoi_above);
  CHECK(mp.y_low == 0.0);
  CHECK(mp.y_high == 0.0);
  CHECK(mp.y_trace.size() == 1);
  REQUIRE(mp.pi_low.actions.size() == mp.pi_high.actions.size());
  for (std::size_t i = 0; i < mp.pi_low.actions.size(); ++i)
    CHECK(mp.pi_low.actions[i] == mp.pi_high.actions[i]);
  // degenerate mixtures never touch the rng
  Rng rng(1);
  (void)mixed_action(mp, SensorState{0, 0, 0, 1}, rng);
  CHECK(rng.draw_count() == 0);
}

TEST_CASE("a binding budget is met exactly by the two-policy mixture") {
  SystemParams p = default_system_params();
  MixedPolicy mp = solve_cmdp(p, table_sensor(1.0), decaying_steps());
  CHECK_FALSE(mp.degenerate);
  CHECK(mp.theta > 0.0);
  CHECK(mp.theta < 1.0);
  CHECK(mp.cost_above > 1.0);
  CHECK(mp.cost_below < 1.0);
  CHECK(mp.avg_cost == doctest::Approx(1.0).epsilon(1e-12));
  // blends are the exact linear interpolation of the bracket
  CHECK(mp.avg_aoi ==
        doctest::Approx(mp.theta * mp.aoi_above + (1 - mp.theta) * mp.aoi_below)
            .epsilon(1e-15));
  // the policy that spends more waits less
  CHECK(mp.aoi_above <= mp.aoi_below);
  CHECK(mp.y_low <= mp.y_high);
  CHECK(mp.y_trace.size() == mp.iterates.size());
  for (std::size_t i = 0; i < mp.iterates.size(); ++i)
    CHECK(mp.iterates[i].y == mp.y_trace[i]);
  // the walk starts at the unconstrained relaxation
  CHECK(mp.y_trace.front() == 0.0);
  CHECK(mp.iterates.front().avg_cost > 1.0);
}

TEST_CASE("the multiplier walk is reproducible run to run") {
  SystemParams p = default_system_params();
  MixedPolicy a = solve_cmdp(p, table_sensor(1.0), decaying_steps());
  MixedPolicy b = solve_cmdp(p, table_sensor(1.0), decaying_steps());
  CHECK(a.theta == b.theta);
  CHECK(a.avg_aoi == b.avg_aoi);
  REQUIRE(a.y_trace.size() == b.y_trace.size());
  for (std::size_t i = 0; i < a.y_trace.size(); ++i) CHECK(a.y_trace[i] == b.y_trace[i]);
  REQUIRE(a.pi_low.actions.size() == b.pi_low.actions.size());
  for (std::size_t i = 0; i < a.pi_low.actions.size(); ++i) {
    CHECK(a.pi_low.actions[i] == b.pi_low.actions[i]);
    CHECK(a.pi_high.actions[i] == b.pi_high.actions[i]);
  }
}

TEST_CASE("an exhausted multiplier budget reports infeasibility") {
  SystemParams p = default_system_params();
  SolverSettings st;
  st.i_stop = 3;  // a tight budget needs far more than three steps
  CHECK_THROWS_AS(solve_cmdp(p, table_sensor(0.51), st), NoFeasiblePolicyError);
}

TEST_CASE("multichain policies are scored by the empirical fallback") {
  // unit sampling rate: serving b = k packets leaves the wait unchanged, so
  // the capped corner of the no-delivery slice is strictly better off idling
  // and every greedy policy splits the chain into several classes
  SystemParams p = make_system_params(180e3, 8, {1.0}, {0.0});
  SensorConfig cfg = make_sensor_config(10, 1, 6, 0.0, 0.05);
  SolverSettings st;
  st.eta = 40.0;
  st.eta_decay = true;
  st.i_stop = 2000;
  MixedPolicy mp = solve_cmdp(p, cfg, st);

  int fallback_iters = 0;
  for (const IterateLog& it : mp.iterates) fallback_iters += it.fallback;
  CHECK(fallback_iters > 0);
  CHECK_FALSE(mp.degenerate);
  // free sampling: the never-transmitting side costs exactly zero
  CHECK(mp.cost_below == 0.0);
  for (const Action& a : mp.pi_high.actions) CHECK_FALSE(a.transmit);
  CHECK(mp.theta == doctest::Approx(0.05 / mp.cost_above).epsilon(1e-12));
  CHECK(mp.avg_cost == doctest::Approx(0.05).epsilon(1e-12));
  CHECK(mp.avg_aoi > 0.0);
}

TEST_CASE("mixture draws follow the mixing probability") {
  MixedPolicy mp;
  mp.theta = 0.25;
  mp.pi_low.actions.assign(1, Action{1, 1});
  mp.pi_high.actions.assign(1, Action{0, 1});
  Rng rng(321);
  const int n = 100000;
  int low_picks = 0;
  for (int i = 0; i < n; ++i) low_picks += mixed_action(mp, 0, rng).transmit;
  CHECK(rng.draw_count() == static_cast<std::uint64_t>(n));
  double f = static_cast<double>(low_picks) / n;
  CHECK(f > 0.24);
  CHECK(f < 0.26);
}

}  // TEST_SUITE
