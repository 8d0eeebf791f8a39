#include "aoi/chain.hpp"

#include <Eigen/SparseLU>
#include <vector>

#include "aoi/error.hpp"
#include "aoi/format.hpp"

namespace aoi {

ChainMatrix build_chain(const StateSpace& space, const SystemParams& p,
                        const DeterministicPolicy& policy) {
  const int m = space.size();
  if (static_cast<int>(policy.actions.size()) != m)
    throw ConfigError("policy size does not match the state space");
  const int W = space.channels();

  std::vector<Eigen::Triplet<double>> trips;
  trips.reserve(static_cast<std::size_t>(m) * W);
  for (int col = 0; col < m; ++col) {
    SensorState s = space.state(col);
    TransitionOutcome o = step_state(space.config(), p, s, policy.actions[col], 1);
    int base = space.grid_index(o.next) * W;
    for (int w = 0; w < W; ++w)
      trips.emplace_back(base + w, col, p.channel_probs[w]);
  }
  ChainMatrix chain;
  chain.cols.resize(m, m);
  chain.cols.setFromTriplets(trips.begin(), trips.end());
  return chain;
}

namespace {

double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return 0.5 * (a - b).lpNorm<1>();
}

// one half-lazy step b <- (X b + b) / 2; same fixed points, aperiodic
Eigen::VectorXd lazy_step(const Eigen::SparseMatrix<double>& X, const Eigen::VectorXd& b) {
  return 0.5 * (X * b + b);
}

}  // namespace

Eigen::VectorXd power_iteration(const ChainMatrix& chain, double tol, long max_iters) {
  const int m = chain.size();
  Eigen::VectorXd b = Eigen::VectorXd::Constant(m, 1.0 / m);
  for (long i = 0; i < max_iters; ++i) {
    Eigen::VectorXd next = lazy_step(chain.cols, b);
    next /= next.sum();  // guards fp mass leakage
    if (total_variation(next, b) < tol) return next;
    b.swap(next);
  }
  throw ConvergenceFailureError("power iteration did not settle within " +
                                std::to_string(max_iters) + " steps");
}

StationaryDistribution solve_stationary(const ChainMatrix& chain,
                                        const StationarySettings& settings) {
  const int m = chain.size();
  if (m < 1) throw ConfigError("empty chain");

  StationaryDistribution out;
  out.dense_path = m <= settings.dense_limit;

  if (out.dense_path) {
    // stacked [X - I; 1'] b = [0; 1], least squares via column-pivoted QR
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m);
    A.topRows(m) = Eigen::MatrixXd(chain.cols) - Eigen::MatrixXd::Identity(m, m);
    A.row(m).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m + 1);
    rhs(m) = 1.0;
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
    if (qr.rank() < m)
      throw NonUnichainError("stacked system is rank-deficient: several recurrent classes");
    out.beta = qr.solve(rhs);
  } else {
    // consistent system: drop one redundant balance row (rows of X - I sum to
    // zero) and put the normalization there instead
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(chain.cols.nonZeros() + 2 * m);
    for (int col = 0; col < m; ++col) {
      trips.emplace_back(0, col, 1.0);
      if (col != 0) trips.emplace_back(col, col, -1.0);
      for (Eigen::SparseMatrix<double>::InnerIterator it(chain.cols, col); it; ++it)
        if (it.row() != 0) trips.emplace_back(it.row(), col, it.value());
    }
    Eigen::SparseMatrix<double> T(m, m);
    T.setFromTriplets(trips.begin(), trips.end());
    T.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(T);
    lu.factorize(T);
    if (lu.info() != Eigen::Success)
      throw NonUnichainError("balance system is singular: several recurrent classes");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs(0) = 1.0;
    out.beta = lu.solve(rhs);
    if (lu.info() != Eigen::Success)
      throw NonUnichainError("balance system solve failed");
  }

  out.fixed_point_residual = (chain.cols * out.beta - out.beta).lpNorm<Eigen::Infinity>();
  out.sum_residual = std::abs(out.beta.sum() - 1.0);
  if (out.fixed_point_residual > settings.residual_tol ||
      out.sum_residual > settings.residual_tol)
    throw NonUnichainError("stationary residual too large (" +
                           fmt_double(out.fixed_point_residual) + ", " +
                           fmt_double(out.sum_residual) + ")");
  if (out.beta.minCoeff() < -1e-10)
    throw NonUnichainError("stationary solution has a negative mass " +
                           fmt_double(out.beta.minCoeff()));
  out.beta = out.beta.cwiseMax(0.0);
  out.beta /= out.beta.sum();

  // cross-check: power iteration started from the solution must not drift
  Eigen::VectorXd drifted = out.beta;
  for (int i = 0; i < settings.drift_steps; ++i) drifted = lazy_step(chain.cols, drifted);
  out.drift_tv = total_variation(drifted, out.beta);
  if (out.drift_tv > settings.drift_tol)
    throw NonUnichainError("solution drifts under the chain (tv=" +
                           fmt_double(out.drift_tv) + ")");
  return out;
}

PolicyAverages policy_averages(const StateSpace& space, const SystemParams& p,
                               const DeterministicPolicy& policy,
                               const Eigen::VectorXd& beta) {
  const int m = space.size();
  if (static_cast<int>(policy.actions.size()) != m || beta.size() != m)
    throw ConfigError("policy/beta size mismatch");
  PolicyAverages avg;
  for (int id = 0; id < m; ++id) {
    if (beta(id) == 0.0) continue;
    SensorState s = space.state(id);
    avg.avg_aoi += beta(id) * epoch_reward(space.config(), s);
    avg.avg_cost += beta(id) * epoch_cost(space.config(), p, s, policy.actions[id]);
  }
  return avg;
}

}  // namespace aoi
