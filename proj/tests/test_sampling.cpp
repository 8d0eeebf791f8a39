#include <atomic>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "aoi/sampling.hpp"
#include "doctest.h"

using namespace aoi;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Synthetic evaluator over a tenths profile (index 1..10; +inf = infeasible).
// Optional hundredths table serves the cliff refinement; calls counts every
// evaluation, including memo misses only.
LambdaEvaluator table_eval(std::vector<double> tenths,
                           std::map<int, double> hundredths = {}, int* calls = nullptr) {
  return [tenths = std::move(tenths), hundredths = std::move(hundredths),
          calls](int num, int den) {
    if (calls) ++*calls;
    double v = kInf;
    if (den == 10) {
      REQUIRE(num >= 1);
      REQUIRE(num <= static_cast<int>(tenths.size()));
      v = tenths[static_cast<std::size_t>(num - 1)];
    } else {
      REQUIRE(den == 100);
      auto it = hundredths.find(num);
      if (it != hundredths.end()) v = it->second;
    }
    LambdaEntry e;
    e.rate_num = num;
    e.rate_den = den;
    e.feasible = std::isfinite(v);
    e.avg_aoi = v;
    e.avg_cost = e.feasible ? 0.5 : 0.0;
    e.theta = e.feasible ? 1.0 : 0.0;
    return e;
  };
}

}  // namespace

TEST_SUITE("sampling-optimizer") {

TEST_CASE("per-sensor grid bound keeps the rate sum strictly under one") {
  CHECK(sensor_grid_upper(1) == 9);
  CHECK(sensor_grid_upper(2) == 4);
  CHECK(sensor_grid_upper(3) == 3);
  CHECK(sensor_grid_upper(4) == 2);
  CHECK(sensor_grid_upper(5) == 1);
  CHECK(sensor_grid_upper(6) == 1);
  CHECK(sensor_grid_upper(7) == 1);
  CHECK(sensor_grid_upper(8) == 1);
  CHECK(sensor_grid_upper(9) == 1);
  for (int n = 1; n <= 9; ++n) CHECK(n * sensor_grid_upper(n) < 10);
  CHECK_THROWS_AS(sensor_grid_upper(10), ConfigError);
  CHECK_THROWS_AS(sensor_grid_upper(11), ConfigError);
  CHECK_THROWS_AS(sensor_grid_upper(0), ConfigError);
}

TEST_CASE("grid bounds are validated") {
  LambdaEvaluator eval = table_eval({1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK_THROWS_AS(bisect_rate(eval, 0), ConfigError);
  CHECK_THROWS_AS(bisect_rate(eval, 11), ConfigError);
  CHECK_THROWS_AS(scan_rates(eval, 0, false, 1), ConfigError);
  CHECK_THROWS_AS(scan_rates(eval, 11, false, 1), ConfigError);
}

TEST_CASE("bisection lands on the dip of a dip-then-cliff profile") {
  LambdaReport rep = bisect_rate(table_eval({10, 8, 6, 5, 7, kInf, kInf, kInf, kInf, kInf}), 10);
  CHECK(rep.lambda_star() == doctest::Approx(0.4));
  CHECK(rep.best().avg_aoi == doctest::Approx(5.0));
}

TEST_CASE("bisection backs down to a lone feasible lowest rate") {
  LambdaReport rep = bisect_rate(table_eval({3, kInf, kInf, kInf, kInf, kInf, kInf, kInf, kInf, kInf}), 10);
  CHECK(rep.lambda_star() == doctest::Approx(0.1));
}

TEST_CASE("bisection rides a fully decreasing profile to the top") {
  LambdaReport rep = bisect_rate(table_eval({10, 9, 8, 7, 6, 5, 4, 3, 2, 1}), 10);
  CHECK(rep.lambda_star() == doctest::Approx(1.0));
}

TEST_CASE("exact ties keep the smaller rate on both search routes") {
  std::vector<double> prof = {5, 4, 4, kInf, kInf, kInf, kInf, kInf, kInf, kInf};
  CHECK(bisect_rate(table_eval(prof), 3).lambda_star() == doctest::Approx(0.2));
  CHECK(scan_rates(table_eval(prof), 10, false, 1).lambda_star() == doctest::Approx(0.2));
}

TEST_CASE("an infeasible grid throws instead of inventing an answer") {
  std::vector<double> dead(10, kInf);
  CHECK_THROWS_AS(bisect_rate(table_eval(dead), 10), AllInfeasibleError);
  CHECK_THROWS_AS(scan_rates(table_eval(dead), 10, false, 1), AllInfeasibleError);
  CHECK_THROWS_AS(scan_rates(table_eval(dead), 10, true, 1), AllInfeasibleError);
  CHECK_THROWS_AS(bisect_rate(table_eval(dead), 1), AllInfeasibleError);
}

TEST_CASE("a one-point grid degenerates to a single probe") {
  int calls = 0;
  LambdaReport rep = bisect_rate(table_eval({7}, {}, &calls), 1);
  CHECK(rep.lambda_star() == doctest::Approx(0.1));
  CHECK(calls == 1);
  CHECK(rep.entries.size() == 1);
}

TEST_CASE("memoized bisection probes far fewer points than the scan") {
  int calls = 0;
  LambdaReport rep =
      bisect_rate(table_eval({10, 9, 8, 7, 6, 5, 4, 3, 2, 1}, {}, &calls), 10);
  CHECK(rep.lambda_star() == doctest::Approx(1.0));
  CHECK(calls <= 8);
  CHECK(static_cast<int>(rep.entries.size()) == calls);  // report = the memo
}

TEST_CASE("bisection matches the exhaustive argmin on decreasing-then-cliff profiles") {
  // the bisection's contract: exact when the profile strictly decreases up
  // to the feasibility cliff (the argmin is then the last feasible rate)
  Rng rng(7777);
  for (int trial = 0; trial < 300; ++trial) {
    int upper = 1 + static_cast<int>(rng.bits() % 10);
    int cliff = 1 + static_cast<int>(rng.bits() % upper);  // last feasible point
    std::vector<double> prof(10, kInf);
    double v = 50.0 + 10.0 * rng.uniform01();
    for (int i = 1; i <= cliff; ++i) {
      prof[static_cast<std::size_t>(i - 1)] = v;
      v -= 0.5 + rng.uniform01();
    }
    CAPTURE(upper);
    CAPTURE(cliff);
    LambdaReport bi = bisect_rate(table_eval(prof), upper);
    LambdaReport sc = scan_rates(table_eval(prof), upper, false, 1);
    CHECK(bi.best().rate_num == cliff);
    CHECK(sc.best().rate_num == cliff);
  }
}

TEST_CASE("the scan covers the grid in ascending rate order") {
  LambdaReport rep = scan_rates(table_eval({10, 8, 6, 5, 7, kInf, kInf, kInf, kInf, kInf}), 10,
                                false, 1);
  REQUIRE(rep.entries.size() == 10);
  for (int i = 0; i < 10; ++i) CHECK(rep.entries[static_cast<std::size_t>(i)].rate_num == i + 1);
  CHECK(rep.lambda_star() == doctest::Approx(0.4));
  CHECK_FALSE(rep.entries[5].feasible);
  CHECK(rep.entries[5].avg_aoi == kInf);
}

TEST_CASE("cliff refinement inserts the hundredths points in order") {
  std::vector<double> tenths = {10, 8, 6, 5, kInf, kInf, kInf, kInf, kInf, kInf};
  std::map<int, double> hund;
  for (int h = 1; h <= 9; ++h) hund[40 + h] = (h <= 3) ? 5.0 - 0.1 * h : kInf;
  LambdaReport rep = scan_rates(table_eval(tenths, hund), 10, true, 1);
  REQUIRE(rep.entries.size() == 19);
  for (std::size_t i = 1; i < rep.entries.size(); ++i) {
    long long a = static_cast<long long>(rep.entries[i - 1].rate_num) * rep.entries[i].rate_den;
    long long b = static_cast<long long>(rep.entries[i].rate_num) * rep.entries[i - 1].rate_den;
    CHECK(a < b);
  }
  CHECK(rep.best().rate_num == 43);
  CHECK(rep.best().rate_den == 100);
  CHECK(rep.lambda_star() == doctest::Approx(0.43));
}

TEST_CASE("no refinement happens when the whole grid is feasible") {
  int calls = 0;
  LambdaReport rep = scan_rates(table_eval({10, 9, 8, 7, 6, 5, 4, 3, 2, 1}, {}, &calls), 10,
                                true, 1);
  CHECK(calls == 10);
  CHECK(rep.entries.size() == 10);
  CHECK(rep.lambda_star() == doctest::Approx(1.0));
}

TEST_CASE("parallel scans return exactly the sequential result") {
  std::vector<double> prof = {9, 7, 5, 4, 4.5, 6, kInf, kInf, kInf, kInf};
  LambdaReport seq = scan_rates(table_eval(prof), 10, false, 1);
  LambdaReport par = scan_rates(table_eval(prof), 10, false, 8);
  REQUIRE(seq.entries.size() == par.entries.size());
  CHECK(seq.best_index == par.best_index);
  for (std::size_t i = 0; i < seq.entries.size(); ++i) {
    CHECK(seq.entries[i].rate_num == par.entries[i].rate_num);
    CHECK(seq.entries[i].feasible == par.entries[i].feasible);
    CHECK(seq.entries[i].avg_aoi == par.entries[i].avg_aoi);
  }
}

TEST_CASE("evaluator failures surface from worker threads") {
  LambdaEvaluator boom = [](int num, int) -> LambdaEntry {
    if (num == 3) throw ConfigError("boom");
    LambdaEntry e;
    e.rate_num = num;
    e.feasible = true;
    e.avg_aoi = 1.0;
    return e;
  };
  CHECK_THROWS_AS(scan_rates(boom, 10, false, 8), ConfigError);
}

TEST_CASE("the solver-backed evaluator rederives the default age cap per rate") {
  SystemParams p = default_system_params();
  SensorConfig base = make_sensor_config(5, 1, 0, 1.0, 0.7);
  base.age_cap = 0;  // automatic: twice the drain wait of the probed rate
  SolverSettings st;
  st.eta_decay = true;
  LambdaEvaluator eval = cmdp_evaluator(p, base, st);

  LambdaEntry e2 = eval(2, 10);
  REQUIRE(e2.feasible);
  CHECK(e2.policy->space.config().age_cap == 10);
  LambdaEntry e5 = eval(5, 10);
  REQUIRE(e5.feasible);
  CHECK(e5.policy->space.config().age_cap == 4);

  // at or past the sampling floor the entry is infeasible, not an exception
  LambdaEntry e7 = eval(7, 10);
  CHECK_FALSE(e7.feasible);
  CHECK(e7.avg_aoi == kInf);
  CHECK(e7.policy == nullptr);
}

TEST_CASE("search routes are consistent on a solved instance") {
  // This instance's profile is not monotone: 0.5 divides the queue grid
  // exactly (two whole packets buffered), 0.6 wastes fraction, so the scan
  // finds a dip at 0.5 that the anchored bisection passes over. The routes
  // must still agree entry-for-entry wherever both probed, and the scan can
  // only match or beat the bisection.
  SystemParams p = default_system_params();
  SensorConfig base = make_sensor_config(5, 1, 0, 1.0, 0.7);
  base.age_cap = 0;
  SolverSettings st;
  st.eta_decay = true;
  LambdaReport bi = optimize_sampling_rate(p, base, st, 10);
  LambdaReport sc = grid_search(p, base, st, 10, false, 4);

  REQUIRE(sc.entries.size() == 10);
  std::vector<bool> feas = {false, true, true, true, true, true, false, false, false, false};
  for (int i = 0; i < 10; ++i) CHECK(sc.entries[static_cast<std::size_t>(i)].feasible == feas[static_cast<std::size_t>(i)]);
  CHECK(sc.best().rate_num == 5);
  CHECK(sc.best().avg_aoi == doctest::Approx(3.98328812438).epsilon(1e-9));
  CHECK(sc.entries[5].avg_aoi == doctest::Approx(3.99995).epsilon(1e-9));  // the rise past the dip

  CHECK(bi.best().feasible);
  CHECK(sc.best().avg_aoi <= bi.best().avg_aoi + 1e-12);
  for (const LambdaEntry& be : bi.entries) {
    const LambdaEntry& se = sc.entries.at(static_cast<std::size_t>(be.rate_num - 1));
    CHECK(se.feasible == be.feasible);
    CHECK(se.avg_aoi == be.avg_aoi);  // bitwise: same solve both routes
    CHECK(se.avg_cost == be.avg_cost);
    CHECK(se.theta == be.theta);
  }
  for (const LambdaEntry& e : sc.entries) {
    if (!e.feasible) continue;
    CHECK(e.avg_cost <= base.energy_budget + 1e-9);
    CHECK(e.theta > 0.0);
    CHECK(e.theta <= 1.0);
  }
}

}  // TEST_SUITE
