#include "aoi/sim.hpp"

#include <algorithm>

#include "aoi/error.hpp"

namespace aoi {

int central_select(const std::vector<LocalReport>& reports, bool* tie_hit) {
  if (tie_hit) *tie_hit = false;
  int best = -1;
  for (std::size_t i = 0; i < reports.size(); ++i) {
    if (best < 0) {
      best = static_cast<int>(i);
      continue;
    }
    // exact compare of dest_scaled/rate_num via cross-multiplication
    auto lhs = static_cast<__int128>(reports[i].dest_scaled) * reports[best].rate_num;
    auto rhs = static_cast<__int128>(reports[best].dest_scaled) * reports[i].rate_num;
    if (lhs > rhs) {
      best = static_cast<int>(i);
      if (tie_hit) *tie_hit = false;
    } else if (lhs == rhs) {
      if (tie_hit) *tie_hit = true;
      if (reports[i].sensor < reports[best].sensor) best = static_cast<int>(i);
    }
  }
  return best;
}

namespace {

struct SensorRun {
  SensorConfig cfg;
  const MixedPolicy* policy = nullptr;
  Rng rng{0};
  SensorState state;
  std::int64_t dest_scaled = 0;

  double sum_dest_epoch = 0.0;   // epoch-start destination age, mini-slots
  double sum_dest_time = 0.0;    // the same held for the epoch length
  double sum_energy = 0.0;
  double sum_queue_time = 0.0;   // epoch-start queue held for the epoch length
  double max_queue = 0.0;
  std::int64_t tx_minislots = 0;
  std::int64_t reports = 0;
  std::int64_t grants = 0;
  std::int64_t clamp_events = 0;
};

void check_scenario(const Scenario& sc) {
  if (sc.sensors.empty()) throw ConfigError("scenario has no sensors");
  if (sc.horizon_epochs == 0 && sc.horizon_slots < 1)
    throw ConfigError("horizon must cover at least one slot");
  std::vector<std::uint64_t> streams;
  for (const auto& setup : sc.sensors) {
    validate(setup.cfg);
    streams.push_back(setup.stream_id);
    if (sc.scheduler == Scheduler::SemiDistributed) {
      if (!setup.policy) throw ConfigError("semi-distributed scheduling needs a policy per sensor");
      const SensorConfig& pc = setup.policy->space.config();
      if (pc.rate_num != setup.cfg.rate_num || pc.rate_den != setup.cfg.rate_den ||
          pc.queue_cap != setup.cfg.queue_cap || pc.age_cap != setup.cfg.age_cap)
        throw ConfigError("policy was solved on a different sensor grid");
    }
  }
  std::sort(streams.begin(), streams.end());
  if (std::adjacent_find(streams.begin(), streams.end()) != streams.end())
    throw ConfigError("sensor rng stream ids must be distinct");
}

}  // namespace

SimReport run_simulation(const Scenario& sc) {
  check_scenario(sc);
  const SystemParams& p = sc.params;
  const int slot = SystemParams::kSlotMinislots;
  const int n = static_cast<int>(sc.sensors.size());

  std::vector<SensorRun> runs(n);
  for (int i = 0; i < n; ++i) {
    runs[i].cfg = sc.sensors[i].cfg;
    runs[i].policy = sc.sensors[i].policy.get();
    runs[i].rng = Rng(substream_seed(sc.seed, sc.sensors[i].stream_id));
    runs[i].state.channel = sample_channel(p, runs[i].rng);
  }

  SimReport rep;
  rep.sensors.resize(n);
  const std::int64_t limit = sc.horizon_epochs > 0 ? 0 : sc.horizon_slots * slot;

  std::int64_t t = 0;  // absolute mini-slot
  std::int64_t epoch = 0;
  std::vector<Action> wants(n);
  std::vector<LocalReport> cands;

  while (sc.horizon_epochs > 0 ? epoch < sc.horizon_epochs : t < limit) {
    int slot_used = static_cast<int>(t % slot);
    cands.clear();

    if (sc.scheduler == Scheduler::SemiDistributed) {
      for (int i = 0; i < n; ++i) {
        wants[i] = mixed_action(*runs[i].policy, runs[i].state, runs[i].rng);
        if (wants[i].transmit == 1 && slot_used + wants[i].minislots <= slot)
          cands.push_back({i, runs[i].dest_scaled, runs[i].cfg.rate_num, wants[i].minislots});
      }
    } else {
      // boundary-greedy: whole-slot grants to the stalest backlogged sensor
      for (int i = 0; i < n; ++i) {
        wants[i] = {0, 1};
        if (whole_packets(runs[i].cfg, runs[i].state) >= 1)
          cands.push_back({i, runs[i].dest_scaled, runs[i].cfg.rate_num, slot});
      }
    }

    bool tie = false;
    int pick = central_select(cands, &tie);
    int winner = pick >= 0 ? cands[pick].sensor : -1;
    int k = pick >= 0 ? cands[pick].minislots : (sc.scheduler == Scheduler::SlotBased ? slot : 1);
    rep.report_count += static_cast<std::int64_t>(cands.size());
    rep.ties_broken += tie && pick >= 0 ? 1 : 0;
    for (auto& c : cands) ++runs[c.sensor].reports;

    bool wrap = slot_used + k >= slot;
    for (int i = 0; i < n; ++i) {
      SensorRun& r = runs[i];
      double dest_pre = static_cast<double>(r.dest_scaled) / r.cfg.rate_num;
      double queue_pre = static_cast<double>(r.state.queue_scaled) / r.cfg.rate_den;
      r.sum_dest_epoch += dest_pre;
      r.sum_dest_time += dest_pre * k;
      r.sum_queue_time += queue_pre * k;
      r.max_queue = std::max(r.max_queue, queue_pre);

      int next_channel = r.state.channel;
      if (sc.redraw == RedrawMode::PerEpoch || wrap) next_channel = sample_channel(p, r.rng);

      if (i == winner) {
        Action g = sc.scheduler == Scheduler::SemiDistributed ? wants[i] : Action{1, slot};
        TransitionOutcome out = step_state(r.cfg, p, r.state, g, next_channel);
        r.dest_scaled = static_cast<std::int64_t>(r.state.age_scaled) +
                        static_cast<std::int64_t>(r.cfg.rate_num) * k -
                        static_cast<std::int64_t>(out.packets_sent - 1) * r.cfg.rate_den;
        r.state = out.next;
        r.sum_energy += out.cost;
        r.tx_minislots += k;
        r.clamp_events += out.clamped ? 1 : 0;
        ++r.grants;
      } else {
        bool clamped = false;
        r.state = advance_unscheduled(r.cfg, r.state, k, &clamped);
        r.state.channel = next_channel;
        r.dest_scaled += static_cast<std::int64_t>(r.cfg.rate_num) * k;
        r.sum_energy += r.cfg.sampling_cost * r.cfg.rate() * k;
        r.clamp_events += clamped ? 1 : 0;
      }
    }

    t += k;
    ++epoch;

    if (sc.record_trace) {
      TraceRow row;
      row.epoch = epoch - 1;
      row.minislot = t - k;
      row.slot_used = slot_used;
      row.winner = winner;
      row.minislots = k;
      for (int i = 0; i < n; ++i) {
        row.states.push_back(runs[i].state);
        row.dest_scaled.push_back(runs[i].dest_scaled);
      }
      rep.trace.push_back(std::move(row));
    }
  }

  rep.epochs = epoch;
  rep.minislots = t;
  rep.slots = t / slot;

  int hundredth_sum = 0;  // rates on a common 1/100 grid
  bool bounded = true;
  for (int i = 0; i < n; ++i) {
    SensorRun& r = runs[i];
    SensorMetrics& m = rep.sensors[i];
    m.epoch_avg_age = r.sum_dest_epoch / static_cast<double>(epoch);
    m.time_avg_age = r.sum_dest_time / static_cast<double>(t);
    m.avg_energy = r.sum_energy / static_cast<double>(epoch);
    m.occupancy = static_cast<double>(r.tx_minislots) / static_cast<double>(t);
    m.mean_queue = r.sum_queue_time / static_cast<double>(t);
    m.max_queue = r.max_queue;
    m.reports = r.reports;
    m.grants = r.grants;
    m.clamp_events = r.clamp_events;

    rep.max_epoch_avg_age = std::max(rep.max_epoch_avg_age, m.epoch_avg_age);
    rep.sum_occupancy += m.occupancy;
    rep.sum_rate += r.cfg.rate();
    hundredth_sum += r.cfg.rate_num * (100 / r.cfg.rate_den);
    if (!(m.mean_queue < 0.9 * r.cfg.queue_cap)) bounded = false;
  }
  rep.rate_precondition = hundredth_sum < 100;
  rep.queues_bounded = bounded;
  rep.stable = rep.rate_precondition && bounded;
  return rep;
}

}  // namespace aoi
