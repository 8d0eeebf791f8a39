#pragma once

#include <functional>
#include <memory>
#include <optional>

#include "aoi/lagrange.hpp"

namespace aoi {

struct LambdaEntry {
  int rate_num = 0;
  int rate_den = 10;
  bool feasible = false;
  double avg_aoi = 0.0;  // +inf when infeasible
  double avg_cost = 0.0;
  double theta = 0.0;
  std::shared_ptr<const MixedPolicy> policy;  // null when infeasible

  double rate() const { return static_cast<double>(rate_num) / rate_den; }
};

struct LambdaReport {
  std::vector<LambdaEntry> entries;  // ascending rate, evaluated points only
  int best_index = -1;

  const LambdaEntry& best() const { return entries.at(best_index); }
  double lambda_star() const { return best().rate(); }
};

// rate_num/rate_den -> evaluation. The CMDP-backed evaluator lives in
// sampling.cpp; tests plug synthetic profiles in here.
using LambdaEvaluator = std::function<LambdaEntry(int rate_num, int rate_den)>;

// Largest tenths-grid rate a sensor may use when n of them share the channel:
// ceil(10/n) - 1 if n divides 10, else floor(10/n). Keeps the rate sum
// strictly under one packet per mini-slot. Throws ConfigError when nothing
// is left (n > 9... n for which the bound is 0).
int sensor_grid_upper(int n_sensors);

// Bisection on the tenths grid, half-up midpoints, anchored at the running
// lower end: a midpoint replaces the anchor only when feasible and strictly
// better. One terminal probe of the upper end covers profiles that never
// turned infeasible. Evaluations are memoized; ties keep the smaller rate.
// Throws AllInfeasibleError when the returned anchor is infeasible.
LambdaReport optimize_sampling_rate(const SystemParams& p, const SensorConfig& base,
                                    const SolverSettings& settings, int grid_upper = 10);
LambdaReport bisect_rate(const LambdaEvaluator& eval, int grid_upper);

// Evaluates every grid point 1..grid_upper (tenths). refine_cliff adds the
// hundredths points between the last feasible and first infeasible tenth.
// threads > 1 evaluates points concurrently (results are position-keyed, so
// output is identical to the sequential run). Throws AllInfeasibleError when
// no grid point is feasible.
LambdaReport grid_search(const SystemParams& p, const SensorConfig& base,
                         const SolverSettings& settings, int grid_upper = 10,
                         bool refine_cliff = false, int threads = 1);
LambdaReport scan_rates(const LambdaEvaluator& eval, int grid_upper,
                        bool refine_cliff, int threads);

// The real evaluator: solve_cmdp at the given rate (age cap re-derived when
// base.age_cap came from the default), infeasible solves map to an
// infeasible entry instead of throwing.
LambdaEvaluator cmdp_evaluator(const SystemParams& p, const SensorConfig& base,
                               const SolverSettings& settings);

}  // namespace aoi
