#pragma once

#include <memory>
#include <vector>

#include "aoi/state_space.hpp"

namespace aoi {

struct ValueIterationSettings {
  double gamma = 0.95;        // 0 <= gamma < 1 (0 degenerates to the myopic rule)
  double zeta = 0.01;         // sup-norm stop threshold on successive sweeps
  long max_iterations = 100000;
};

struct ValueTable {
  double multiplier = 0.0;
  double gamma = 0.95;
  long iterations = 0;
  double final_delta = 0.0;
  std::vector<double> values;       // by state id
  std::vector<double> delta_trace;  // sup-norm per sweep
};

struct DeterministicPolicy {
  double multiplier = 0.0;
  std::vector<Action> actions;  // by state id
};

struct ViResult {
  DeterministicPolicy policy;
  ValueTable table;
};

// Per-space tables the sweep loop runs on: successor grid indices, action
// lists per queue level, reward and cost pieces. Build once, reuse across
// multipliers.
class MdpTables {
 public:
  static MdpTables build(const StateSpace& space, const SystemParams& p);

  const StateSpace& space() const { return *space_; }
  const SystemParams& params() const { return *params_; }

  // flattened per-(grid, action) successor grid index
  const std::vector<int>& action_offset() const { return action_offset_; }  // by grid, size J+1
  const std::vector<Action>& actions() const { return actions_; }           // concatenated
  const std::vector<int>& successor() const { return successor_; }          // same layout
  const std::vector<double>& sample_cost() const { return sample_cost_; }   // same layout
  const std::vector<double>& reward() const { return reward_; }             // by grid

 private:
  const StateSpace* space_ = nullptr;
  const SystemParams* params_ = nullptr;
  std::vector<int> action_offset_;
  std::vector<Action> actions_;
  std::vector<int> successor_;
  std::vector<double> sample_cost_;
  std::vector<double> reward_;
};

// Discounted sweep over min_g { reward + multiplier*cost + gamma * E[v'] }
// until the sup-norm of successive sweeps drops below zeta. Ties pick the
// lexicographically smallest (transmit, minislots). Throws
// ConvergenceFailureError past max_iterations. warm_start (matching size)
// seeds the sweep; the fixed point does not depend on it.
ViResult value_iteration(const StateSpace& space, const SystemParams& p,
                         double multiplier, const ValueIterationSettings& settings);
ViResult value_iteration(const MdpTables& tables, double multiplier,
                         const ValueIterationSettings& settings,
                         const std::vector<double>* warm_start = nullptr);

}  // namespace aoi
