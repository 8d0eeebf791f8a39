#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "aoi/value_iteration.hpp"

namespace aoi {

// Column-stochastic: cols.col(m) is the outgoing distribution of state m
// under the fixed policy, channel redrawn every epoch.
struct ChainMatrix {
  Eigen::SparseMatrix<double> cols;
  int size() const { return static_cast<int>(cols.rows()); }
};

ChainMatrix build_chain(const StateSpace& space, const SystemParams& p,
                        const DeterministicPolicy& policy);

struct StationarySettings {
  int dense_limit = 1200;       // stacked least-squares up to here, sparse LU beyond
  double residual_tol = 1e-8;   // on ||X b - b||inf and |sum b - 1|
  int drift_steps = 50;         // cross-check: power steps started from the solution
  double drift_tol = 1e-6;      // total-variation agreement required
};

struct StationaryDistribution {
  Eigen::VectorXd beta;
  double fixed_point_residual = 0.0;  // ||X b - b||inf before clipping
  double sum_residual = 0.0;          // |1'b - 1| before renormalizing
  double drift_tv = 0.0;              // cross-check drift
  bool dense_path = false;
};

// Solves [X - I; 1'] b = [0; 1]. Dense path: stacked least-squares (QR).
// Sparse path: same consistent system via LU with one row replaced by the
// normalization row. Residuals checked on both; a failed residual, rank
// deficiency, or drift past drift_tol throws NonUnichainError.
StationaryDistribution solve_stationary(const ChainMatrix& chain,
                                        const StationarySettings& settings = {});

// Cold-start power iteration on the half-lazy chain (X + I)/2, which has the
// same fixed points but is aperiodic. Stops when successive iterates agree
// within tol in total variation; throws ConvergenceFailureError at max_iters.
Eigen::VectorXd power_iteration(const ChainMatrix& chain, double tol = 1e-12,
                                long max_iters = 200000);

struct PolicyAverages {
  double avg_aoi = 0.0;   // destination age per epoch, mini-slots
  double avg_cost = 0.0;  // energy per epoch
};

PolicyAverages policy_averages(const StateSpace& space, const SystemParams& p,
                               const DeterministicPolicy& policy,
                               const Eigen::VectorXd& beta);

}  // namespace aoi
