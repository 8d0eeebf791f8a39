#include "aoi/value_iteration.hpp"

#include <cmath>
#include <limits>

#include "aoi/error.hpp"
#include "aoi/format.hpp"

namespace aoi {

MdpTables MdpTables::build(const StateSpace& space, const SystemParams& p) {
  MdpTables t;
  t.space_ = &space;
  t.params_ = &p;
  const SensorConfig& cfg = space.config();
  int grids = space.grid_count();

  t.action_offset_.reserve(grids + 1);
  t.reward_.reserve(grids);
  t.action_offset_.push_back(0);
  for (int j = 0; j < grids; ++j) {
    SensorState s = space.state(space.id_from_grid(j, 1));
    t.reward_.push_back(epoch_reward(cfg, s));
    for (const Action& g : feasible_actions(cfg, s)) {
      // successor grid does not depend on the current channel
      TransitionOutcome o = step_state(cfg, p, s, g, 1);
      t.actions_.push_back(g);
      t.successor_.push_back(space.grid_index(o.next));
      t.sample_cost_.push_back(cfg.sampling_cost * cfg.rate() * g.minislots);
    }
    t.action_offset_.push_back(static_cast<int>(t.actions_.size()));
  }
  return t;
}

ViResult value_iteration(const StateSpace& space, const SystemParams& p,
                         double multiplier, const ValueIterationSettings& settings) {
  return value_iteration(MdpTables::build(space, p), multiplier, settings);
}

ViResult value_iteration(const MdpTables& t, double multiplier,
                         const ValueIterationSettings& settings,
                         const std::vector<double>* warm_start) {
  if (!(settings.gamma >= 0.0 && settings.gamma < 1.0))
    throw ConfigError("gamma must be in [0, 1)");
  if (!(settings.zeta > 0.0)) throw ConfigError("zeta must be positive");
  if (multiplier < 0.0) throw ConfigError("multiplier must be non-negative");

  const StateSpace& space = t.space();
  const SystemParams& p = t.params();
  const int W = space.channels();
  const int grids = space.grid_count();
  const double gamma = settings.gamma;

  std::vector<double> v(space.size(), 0.0), vnext(space.size(), 0.0);
  if (warm_start && warm_start->size() == v.size()) v = *warm_start;
  std::vector<double> ev(grids, 0.0);  // E over next channel of v at a successor grid
  ValueTable table;
  table.multiplier = multiplier;
  table.gamma = gamma;

  long iter = 0;
  double delta = 0.0;
  for (;;) {
    if (++iter > settings.max_iterations)
      throw ConvergenceFailureError("value iteration still at delta=" + fmt_double(delta) +
                                    " after " + std::to_string(settings.max_iterations) +
                                    " sweeps");
    for (int j = 0; j < grids; ++j) {
      double acc = 0.0;
      const double* base = v.data() + static_cast<std::size_t>(j) * W;
      for (int w = 0; w < W; ++w) acc += p.channel_probs[w] * base[w];
      ev[j] = acc;
    }
    delta = 0.0;
    for (int j = 0; j < grids; ++j) {
      const int lo = t.action_offset()[j], hi = t.action_offset()[j + 1];
      for (int w = 0; w < W; ++w) {
        double best = std::numeric_limits<double>::infinity();
        for (int a = lo; a < hi; ++a) {
          const Action& g = t.actions()[a];
          double c = t.sample_cost()[a];
          if (g.transmit) c += p.power[w] * g.minislots;
          double cand = t.reward()[j] + multiplier * c + gamma * ev[t.successor()[a]];
          if (cand < best) best = cand;
        }
        const int id = j * W + w;
        double d = std::abs(best - v[id]);
        if (d > delta) delta = d;
        vnext[id] = best;
      }
    }
    v.swap(vnext);
    table.delta_trace.push_back(delta);
    if (delta < settings.zeta) break;
  }
  table.iterations = iter;
  table.final_delta = delta;

  // greedy extraction against the converged table; ties keep the first
  // action in canonical order (idle, then ascending k)
  DeterministicPolicy policy;
  policy.multiplier = multiplier;
  policy.actions.resize(space.size());
  for (int j = 0; j < grids; ++j) {
    double acc = 0.0;
    const double* base = v.data() + static_cast<std::size_t>(j) * W;
    for (int w = 0; w < W; ++w) acc += p.channel_probs[w] * base[w];
    ev[j] = acc;
  }
  for (int j = 0; j < grids; ++j) {
    const int lo = t.action_offset()[j], hi = t.action_offset()[j + 1];
    for (int w = 0; w < W; ++w) {
      double best = std::numeric_limits<double>::infinity();
      Action pick{0, 1};
      for (int a = lo; a < hi; ++a) {
        const Action& g = t.actions()[a];
        double c = t.sample_cost()[a];
        if (g.transmit) c += p.power[w] * g.minislots;
        double cand = t.reward()[j] + multiplier * c + gamma * ev[t.successor()[a]];
        if (cand < best) {
          best = cand;
          pick = g;
        }
      }
      policy.actions[j * W + w] = pick;
    }
  }

  table.values = std::move(v);
  return ViResult{std::move(policy), std::move(table)};
}

}  // namespace aoi
