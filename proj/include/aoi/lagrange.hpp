#pragma once

#include <cstdint>

#include "aoi/chain.hpp"

namespace aoi {

struct SolverSettings {
  ValueIterationSettings vi;
  StationarySettings stationary;
  double eta = 0.1;        // subgradient step
  bool eta_decay = false;  // eta / i instead of constant
  double epsilon = 0.01;   // multiplier-step stop threshold
  int i_stop = 200;        // multiplier iterations before declaring infeasible
  std::int64_t state_limit = 1'000'000;
  // deterministic fallback evaluation when the policy chain is not unichain
  std::int64_t fallback_epochs = 200000;
  std::uint64_t fallback_seed = 0x00c0ffee5eedULL;
};

struct IterateLog {
  double y = 0.0;
  double avg_cost = 0.0;
  double avg_aoi = 0.0;
  bool fallback = false;  // averages came from the empirical fallback
};

// Randomized mixture of two deterministic policies. pi_low carries the lower
// multiplier (spends above budget), pi_high the higher one (below budget);
// each epoch pi_low acts with probability theta. Degenerate cases set
// theta to exactly 1 (unconstrained optimum feasible) or 0.
struct MixedPolicy {
  StateSpace space;
  DeterministicPolicy pi_low;
  DeterministicPolicy pi_high;
  double theta = 1.0;
  double avg_aoi = 0.0;   // theta-blend, exact by construction
  double avg_cost = 0.0;
  double aoi_above = 0.0, cost_above = 0.0;  // pi_low averages
  double aoi_below = 0.0, cost_below = 0.0;  // pi_high averages
  double y_low = 0.0, y_high = 0.0;          // multipliers behind pi_low / pi_high
  std::vector<double> y_trace;
  std::vector<IterateLog> iterates;
  bool degenerate = false;
};

// theta = (budget - cost_below) / (cost_above - cost_below); requires
// cost_above > budget > cost_below, else InvalidBracketError.
double mixing_parameter(double cost_above, double cost_below, double budget);

// Multiplier search: solve at y=0; if already within budget return it alone.
// Otherwise walk y by eta*(cost - budget) (clipped at 0, optional 1/i decay),
// keep the closest bracket endpoints on each side of the budget, stop when an
// iterate lands strictly below budget with |dy| < epsilon. i_stop exhausted
// or an up-front budget below the idle floor (sampling_cost * rate) throws
// NoFeasiblePolicyError.
MixedPolicy solve_cmdp(const SystemParams& p, const SensorConfig& cfg,
                       const SolverSettings& settings = {});

// theta = 1 or 0 never touches the rng (draw-count stable).
Action mixed_action(const MixedPolicy& mp, int state_id, Rng& rng);
Action mixed_action(const MixedPolicy& mp, const SensorState& s, Rng& rng);

}  // namespace aoi
