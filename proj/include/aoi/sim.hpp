#pragma once

#include <cstdint>
#include <memory>

#include "aoi/lagrange.hpp"

namespace aoi {

enum class Scheduler { SemiDistributed, SlotBased };

// One sensor in a scenario. Semi-distributed scheduling consults the policy
// every epoch; slot-based ignores it (boundary-greedy rule). stream_id keys
// the sensor's RNG substream so identical sensors can swap positions along
// with their draws.
struct SensorSetup {
  SensorConfig cfg;
  std::shared_ptr<const MixedPolicy> policy;
  std::uint64_t stream_id = 0;
};

struct Scenario {
  SystemParams params;
  std::vector<SensorSetup> sensors;
  Scheduler scheduler = Scheduler::SemiDistributed;
  RedrawMode redraw = RedrawMode::PerSlot;
  std::int64_t horizon_slots = 1000;   // used when horizon_epochs == 0
  std::int64_t horizon_epochs = 0;     // analytic-consistency runs count epochs instead
  std::uint64_t seed = 1;
  bool record_trace = false;
};

// What a sensor reports into the candidate set: it wants to transmit and the
// request fits in the current slot. dest_scaled is the destination age times
// rate_num (exact integer; uncapped).
struct LocalReport {
  int sensor = 0;
  std::int64_t dest_scaled = 0;
  int rate_num = 1;
  int minislots = 1;
};

// Index into reports of the winner: largest destination age, ties to the
// lowest sensor id. -1 when empty. tie_hit reports whether the winner was
// tied with another candidate.
int central_select(const std::vector<LocalReport>& reports, bool* tie_hit = nullptr);

struct SensorMetrics {
  double epoch_avg_age = 0.0;  // destination age averaged over epoch starts, mini-slots
  double time_avg_age = 0.0;   // mini-slot-weighted (epoch-start value held for k slots)
  double avg_energy = 0.0;     // per epoch
  double occupancy = 0.0;      // share of mini-slots this sensor transmitted in
  double mean_queue = 0.0;     // packets
  double max_queue = 0.0;
  std::int64_t reports = 0;    // times it entered the candidate set
  std::int64_t grants = 0;
  std::int64_t clamp_events = 0;
};

struct TraceRow {
  std::int64_t epoch = 0;
  std::int64_t minislot = 0;  // absolute, at epoch start
  int slot_used = 0;          // mini-slots already consumed in the slot
  int winner = -1;
  int minislots = 1;
  std::vector<SensorState> states;            // post-transition
  std::vector<std::int64_t> dest_scaled;      // post-transition
};

struct SimReport {
  std::vector<SensorMetrics> sensors;
  double max_epoch_avg_age = 0.0;  // worst sensor
  double sum_occupancy = 0.0;
  double sum_rate = 0.0;
  bool rate_precondition = false;  // sum of rates < 1
  bool queues_bounded = false;     // every mean queue < 0.9 * its cap
  bool stable = false;             // both of the above
  std::int64_t epochs = 0;
  std::int64_t minislots = 0;
  std::int64_t slots = 0;
  std::int64_t ties_broken = 0;
  std::int64_t report_count = 0;   // candidate-set entries over the run
  std::vector<TraceRow> trace;
};

// Mini-slot clock: slot_used advances mod 14, an epoch of k mini-slots is
// admitted only when it fits the current slot, channels redraw on wrap (or
// per epoch). The winner takes the scheduled transition; everyone else ages
// by the same k. Identical scenario and seed give identical reports.
SimReport run_simulation(const Scenario& scenario);

}  // namespace aoi
