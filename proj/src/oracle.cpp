#include "aoi/oracle.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <vector>

#include "aoi/error.hpp"

namespace aoi {

double policy_discounted_value(const StateSpace& space, const SystemParams& p,
                               const DeterministicPolicy& policy, double multiplier,
                               double gamma, int max_states) {
  int n = space.size();
  if (n > max_states)
    throw TooLargeError("exact evaluation limited to " + std::to_string(max_states) +
                        " states, instance has " + std::to_string(n));
  if (!(gamma >= 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in [0, 1)");
  if (static_cast<int>(policy.actions.size()) != n)
    throw ConfigError("policy table does not match the state space");

  Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd r(n);
  for (int i = 0; i < n; ++i) {
    SensorState s = space.state(i);
    const Action& g = policy.actions[i];
    r[i] = epoch_reward(space.config(), s) + multiplier * epoch_cost(space.config(), p, s, g);
    for (auto& [j, prob] : transition_distribution(space, p, s, g)) a(i, j) -= gamma * prob;
  }
  Eigen::VectorXd v = a.partialPivLu().solve(r);

  double start = 0.0;
  for (int w = 1; w <= space.channels(); ++w)
    start += p.channel_probs[w - 1] * v[space.start_id(w)];
  return start;
}

EnumeratedBest enumerate_best_policy(const SystemParams& p, const SensorConfig& cfg,
                                     double multiplier, double gamma,
                                     const TinyInstanceLimits& limits) {
  StateSpace space = enumerate_states(p, cfg, limits.max_states);
  int n = space.size();
  if (n > limits.max_states)
    throw TooLargeError("brute force limited to " + std::to_string(limits.max_states) +
                        " states, instance has " + std::to_string(n));

  std::vector<std::vector<Action>> choices(n);
  std::uint64_t total = 1;
  for (int i = 0; i < n; ++i) {
    choices[i] = feasible_actions(cfg, space.state(i));
    std::uint64_t width = choices[i].size();
    if (total > limits.max_policies / width)
      throw TooLargeError("policy count exceeds " + std::to_string(limits.max_policies));
    total *= width;
  }

  DeterministicPolicy current;
  current.multiplier = multiplier;
  current.actions.resize(n);
  std::vector<std::size_t> digit(n, 0);
  for (int i = 0; i < n; ++i) current.actions[i] = choices[i][0];

  EnumeratedBest best;
  best.value = std::numeric_limits<double>::infinity();
  for (;;) {
    double value = policy_discounted_value(space, p, current, multiplier, gamma,
                                           limits.max_states);
    ++best.policies_evaluated;
    if (value < best.value) {
      best.value = value;
      best.policy = current;
    }
    // odometer step, last state fastest
    int pos = n - 1;
    while (pos >= 0) {
      if (++digit[pos] < choices[pos].size()) {
        current.actions[pos] = choices[pos][digit[pos]];
        break;
      }
      digit[pos] = 0;
      current.actions[pos] = choices[pos][0];
      --pos;
    }
    if (pos < 0) break;
  }
  return best;
}

PolicyFn policy_fn(const StateSpace& space, const DeterministicPolicy& policy) {
  return [space, policy](const SensorState& s, Rng&) { return policy.actions.at(space.id(s)); };
}

PolicyFn policy_fn(const MixedPolicy& mp) {
  return [mp](const SensorState& s, Rng& rng) { return mixed_action(mp, s, rng); };
}

MonteCarloResult monte_carlo_evaluate(const StateSpace& space, const SystemParams& p,
                                      const PolicyFn& policy, std::int64_t epochs,
                                      std::uint64_t seed, RedrawMode redraw) {
  if (epochs < 1) throw ConfigError("need at least one epoch");
  const SensorConfig& cfg = space.config();
  Rng rng(seed);

  SensorState s;
  s.channel = sample_channel(p, rng);
  int slot_used = 0;

  std::int64_t nb = std::min<std::int64_t>(20, epochs);
  std::vector<double> batch_aoi(nb, 0.0), batch_cost(nb, 0.0);
  std::vector<std::int64_t> batch_len(nb, 0);
  double sum_aoi = 0.0, sum_cost = 0.0;

  for (std::int64_t e = 0; e < epochs; ++e) {
    Action g = policy(s, rng);
    int next_channel = s.channel;
    bool wrap = (slot_used + g.minislots) >= SystemParams::kSlotMinislots;
    if (redraw == RedrawMode::PerEpoch || wrap) next_channel = sample_channel(p, rng);
    slot_used = (slot_used + g.minislots) % SystemParams::kSlotMinislots;

    TransitionOutcome out = step_state(cfg, p, s, g, next_channel);
    std::int64_t b = e * nb / epochs;
    batch_aoi[b] += out.reward;
    batch_cost[b] += out.cost;
    ++batch_len[b];
    sum_aoi += out.reward;
    sum_cost += out.cost;
    s = out.next;
  }

  MonteCarloResult res;
  res.epochs = epochs;
  res.avg_aoi = sum_aoi / static_cast<double>(epochs);
  res.avg_cost = sum_cost / static_cast<double>(epochs);
  if (nb > 1) {
    double va = 0.0, vc = 0.0;
    for (std::int64_t b = 0; b < nb; ++b) {
      double ma = batch_aoi[b] / batch_len[b] - res.avg_aoi;
      double mc = batch_cost[b] / batch_len[b] - res.avg_cost;
      va += ma * ma;
      vc += mc * mc;
    }
    res.aoi_stderr = std::sqrt(va / (nb - 1) / nb);
    res.cost_stderr = std::sqrt(vc / (nb - 1) / nb);
  }
  return res;
}

}  // namespace aoi
