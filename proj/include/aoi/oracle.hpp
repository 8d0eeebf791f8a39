#pragma once

#include <cstdint>
#include <functional>

#include "aoi/chain.hpp"
#include "aoi/sim.hpp"

namespace aoi {

struct TinyInstanceLimits {
  int max_states = 200;
  std::uint64_t max_policies = 1'000'000;
};

struct EnumeratedBest {
  DeterministicPolicy policy;
  double value = 0.0;  // expected discounted reward + y*cost from the canonical start
  std::uint64_t policies_evaluated = 0;
};

// Exact discounted evaluation of a fixed policy: solve (I - gamma*P) v = r,
// then average the start states over the channel distribution. Dense; guarded
// by max_states.
double policy_discounted_value(const StateSpace& space, const SystemParams& p,
                               const DeterministicPolicy& policy, double multiplier,
                               double gamma, int max_states = 200);

// Brute force over every feasible deterministic stationary policy (mixed-radix
// walk over per-state action sets), each evaluated exactly. Guards: state
// count and total policy count; violations throw TooLargeError. First-found
// wins ties, and the walk is lexicographic in (state id, action order).
EnumeratedBest enumerate_best_policy(const SystemParams& p, const SensorConfig& cfg,
                                     double multiplier, double gamma,
                                     const TinyInstanceLimits& limits = {});

using PolicyFn = std::function<Action(const SensorState&, Rng&)>;

PolicyFn policy_fn(const StateSpace& space, const DeterministicPolicy& policy);
PolicyFn policy_fn(const MixedPolicy& mp);

struct MonteCarloResult {
  double avg_aoi = 0.0;
  double avg_cost = 0.0;
  double aoi_stderr = 0.0;   // batch-means standard error
  double cost_stderr = 0.0;
  std::int64_t epochs = 0;
};

// Single-sensor epoch chain from the canonical start. PerEpoch redraw matches
// the decision-epoch kernel and is what analytics are compared against;
// PerSlot redraws on slot wrap (no admission control here, this evaluates the
// chain, not the protocol).
MonteCarloResult monte_carlo_evaluate(const StateSpace& space, const SystemParams& p,
                                      const PolicyFn& policy, std::int64_t epochs,
                                      std::uint64_t seed,
                                      RedrawMode redraw = RedrawMode::PerEpoch);

}  // namespace aoi
