#include "aoi/lagrange.hpp"

#include <cmath>

#include "aoi/error.hpp"
#include "aoi/format.hpp"
#include "aoi/oracle.hpp"

namespace aoi {

double mixing_parameter(double cost_above, double cost_below, double budget) {
  if (!(cost_above > budget && budget > cost_below))
    throw InvalidBracketError("need cost_above > budget > cost_below, got " +
                              fmt_double(cost_above) + " / " + fmt_double(budget) + " / " +
                              fmt_double(cost_below));
  return (budget - cost_below) / (cost_above - cost_below);
}

namespace {

struct Evaluated {
  DeterministicPolicy policy;
  double avg_aoi = 0.0;
  double avg_cost = 0.0;
  bool fallback = false;
};

// The greedy policy changes only at multiplier breakpoints, so the walk
// revisits a handful of policies; keep their long-run averages around and
// warm-start each sweep from the previous value table.
struct MultiplierEvaluator {
  const MdpTables& tables;
  const SolverSettings& st;
  std::vector<double> warm;
  std::vector<Evaluated> seen;

  Evaluated operator()(double y) {
    ViResult vi = value_iteration(tables, y, st.vi, warm.empty() ? nullptr : &warm);
    warm = std::move(vi.table.values);
    for (const Evaluated& e : seen)
      if (e.policy.actions == vi.policy.actions) {
        Evaluated hit = e;
        hit.policy.multiplier = y;
        return hit;
      }

    Evaluated e;
    e.policy = std::move(vi.policy);
    ChainMatrix chain = build_chain(tables.space(), tables.params(), e.policy);
    try {
      StationaryDistribution sd = solve_stationary(chain, st.stationary);
      PolicyAverages avg = policy_averages(tables.space(), tables.params(), e.policy, sd.beta);
      e.avg_aoi = avg.avg_aoi;
      e.avg_cost = avg.avg_cost;
    } catch (const NonUnichainError&) {
      // several recurrent classes: score what the policy actually does from
      // the canonical start instead of failing the whole search
      MonteCarloResult mc =
          monte_carlo_evaluate(tables.space(), tables.params(),
                               policy_fn(tables.space(), e.policy), st.fallback_epochs,
                               st.fallback_seed, RedrawMode::PerEpoch);
      e.avg_aoi = mc.avg_aoi;
      e.avg_cost = mc.avg_cost;
      e.fallback = true;
    }
    seen.push_back(e);
    return e;
  }
};

}  // namespace

MixedPolicy solve_cmdp(const SystemParams& p, const SensorConfig& cfg,
                       const SolverSettings& st) {
  validate(cfg);
  if (!(st.eta > 0)) throw ConfigError("eta must be positive");
  if (!(st.epsilon > 0)) throw ConfigError("epsilon must be positive");
  if (st.i_stop < 1) throw ConfigError("i_stop must be at least 1");

  // every policy pays the sampling floor each epoch, so a budget at or below
  // it can never satisfy the strict stop rule; skip the doomed search
  double floor = cfg.sampling_cost * cfg.rate();
  if (floor >= cfg.energy_budget)
    throw NoFeasiblePolicyError("budget " + fmt_double(cfg.energy_budget) +
                                " at or below the sampling floor " + fmt_double(floor));

  StateSpace space = enumerate_states(p, cfg, st.state_limit);
  MdpTables tables = MdpTables::build(space, p);

  MixedPolicy mp;
  mp.space = space;

  auto log_iter = [&](double y, const Evaluated& e) {
    mp.y_trace.push_back(y);
    mp.iterates.push_back({y, e.avg_cost, e.avg_aoi, e.fallback});
  };

  auto degenerate_single = [&](const Evaluated& e, double theta, double y_at) {
    mp.pi_low = e.policy;
    mp.pi_high = e.policy;
    mp.theta = theta;
    mp.avg_aoi = mp.aoi_above = mp.aoi_below = e.avg_aoi;
    mp.avg_cost = mp.cost_above = mp.cost_below = e.avg_cost;
    mp.y_low = mp.y_high = y_at;
    mp.degenerate = true;
    return mp;
  };

  MultiplierEvaluator evaluate{tables, st, {}, {}};
  Evaluated cur = evaluate(0.0);
  log_iter(0.0, cur);
  if (cur.avg_cost <= cfg.energy_budget) return degenerate_single(cur, 1.0, 0.0);

  bool have_above = true, have_below = false;
  Evaluated above = cur, below;
  double y_above = 0.0, y_below = 0.0;
  double y_prev = 0.0, y = 0.0;

  for (int i = 1; i <= st.i_stop; ++i) {
    double step = st.eta_decay ? st.eta / i : st.eta;
    y = std::max(0.0, y_prev + step * (cur.avg_cost - cfg.energy_budget));
    cur = evaluate(y);
    log_iter(y, cur);

    if (std::abs(cur.avg_cost - cfg.energy_budget) <= 1e-12)
      return degenerate_single(cur, 0.0, y);  // landed exactly on budget

    if (cur.avg_cost > cfg.energy_budget) {
      if (!have_above || cur.avg_cost < above.avg_cost) {
        above = cur;
        y_above = y;
        have_above = true;
      }
    } else {
      if (!have_below || cur.avg_cost > below.avg_cost) {
        below = cur;
        y_below = y;
        have_below = true;
      }
    }

    if (cur.avg_cost < cfg.energy_budget && std::abs(y - y_prev) < st.epsilon) break;
    y_prev = y;
    if (i == st.i_stop)
      throw NoFeasiblePolicyError("no feasible policy within " + std::to_string(st.i_stop) +
                                  " multiplier iterations (budget " +
                                  fmt_double(cfg.energy_budget) + ")");
  }

  if (!have_above || !have_below)
    throw NoFeasiblePolicyError("multiplier search ended without a two-sided bracket");

  mp.pi_low = above.policy;   // lower multiplier, spends above budget
  mp.pi_high = below.policy;  // higher multiplier, below budget
  mp.y_low = y_above;
  mp.y_high = y_below;
  mp.aoi_above = above.avg_aoi;
  mp.cost_above = above.avg_cost;
  mp.aoi_below = below.avg_aoi;
  mp.cost_below = below.avg_cost;
  mp.theta = mixing_parameter(mp.cost_above, mp.cost_below, cfg.energy_budget);
  mp.avg_aoi = mp.theta * mp.aoi_above + (1.0 - mp.theta) * mp.aoi_below;
  mp.avg_cost = mp.theta * mp.cost_above + (1.0 - mp.theta) * mp.cost_below;
  return mp;
}

Action mixed_action(const MixedPolicy& mp, int state_id, Rng& rng) {
  if (mp.theta >= 1.0) return mp.pi_low.actions.at(state_id);
  if (mp.theta <= 0.0) return mp.pi_high.actions.at(state_id);
  return rng.bernoulli(mp.theta) ? mp.pi_low.actions.at(state_id)
                                 : mp.pi_high.actions.at(state_id);
}

Action mixed_action(const MixedPolicy& mp, const SensorState& s, Rng& rng) {
  return mixed_action(mp, mp.space.id(s), rng);
}

}  // namespace aoi
