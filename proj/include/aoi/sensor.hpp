#pragma once

#include <vector>

#include "aoi/system_params.hpp"

namespace aoi {

// When the channel state is redrawn. The decision-epoch chain redraws per
// epoch; the protocol simulator redraws at slot boundaries. Consumers say
// which they use.
enum class RedrawMode { PerEpoch, PerSlot };

// Everything about one sensor is kept on an exact integer grid so state
// updates never leave it:
//   sampling rate        = rate_num / rate_den packets per mini-slot
//   queue_scaled         = queued data * rate_den   (grid step gcd(rate_num, rate_den))
//   age_scaled           = head-of-line wait (mini-slots) * rate_num
//   gap_scaled           = delivery gap * rate_num, always 0 or rate_den
// rate_den is 10 for the standard tenths grid; 100 for the optional
// hundredths refinement near a feasibility cliff.
struct SensorConfig {
  int rate_num = 5;
  int rate_den = 10;
  int queue_cap = 3;           // packets
  int age_cap = 12;            // mini-slots the head-of-line wait is truncated at
  double sampling_cost = 1.0;  // energy per whole packet sampled
  double energy_budget = 1.0;  // per-epoch average energy allowance

  double rate() const { return static_cast<double>(rate_num) / rate_den; }
  int grid_step() const;
  int age_scaled_max() const { return age_cap * rate_num; }
  int queue_scaled_max() const { return rate_den * queue_cap; }
};

// age_cap default when not pinned by the caller: twice the full-queue
// drain-wait, ceil(2 * queue_cap / rate).
int default_age_cap(int rate_num, int rate_den, int queue_cap);

// rate in tenths (1..10); age_cap 0 means "use the default".
SensorConfig make_sensor_config(int lambda_tenths, int queue_cap, int age_cap,
                                double sampling_cost, double energy_budget);

void validate(const SensorConfig& cfg);  // throws ConfigError

struct SensorState {
  int age_scaled = 0;
  int gap_scaled = 0;
  int queue_scaled = 0;
  int channel = 1;  // 1..W
};

// (transmit, minislots) = (u, k). Idle is (0, 1): exactly one mini-slot
// passes. A transmitting epoch spans k mini-slots and serves
// min(k, whole packets) packets.
struct Action {
  int transmit = 0;
  int minislots = 1;
};

inline bool operator==(const Action& a, const Action& b) {
  return a.transmit == b.transmit && a.minislots == b.minislots;
}

struct TransitionOutcome {
  SensorState next;
  int packets_sent = 0;
  double reward = 0.0;  // destination age of the departed state, mini-slots
  double cost = 0.0;    // energy spent this epoch
  bool clamped = false; // some component hit its cap (or floor)
};

int whole_packets(const SensorConfig& cfg, const SensorState& s);

// Idle always; (1, k) for 1 <= k <= min(14, whole packets).
std::vector<Action> feasible_actions(const SensorConfig& cfg, const SensorState& s);

// (age_scaled + gap_scaled) / rate_num: the destination age in mini-slots.
double epoch_reward(const SensorConfig& cfg, const SensorState& s);

// sampling_cost * rate * k, plus power[channel] * k when transmitting.
double epoch_cost(const SensorConfig& cfg, const SystemParams& p,
                  const SensorState& s, const Action& g);

// One decision epoch. next_channel becomes the channel of the successor
// (caller picks the redraw convention). Throws InfeasibleActionError on a
// transmit with zero whole packets queued or a malformed action.
TransitionOutcome step_state(const SensorConfig& cfg, const SystemParams& p,
                             const SensorState& s, const Action& g, int next_channel);

// Aging of a sensor that was not scheduled while `elapsed` mini-slots pass:
// queue and wait grow by rate*elapsed, gap and channel stay. Saturates at
// the caps. The single-sensor idle action is this with elapsed = 1.
SensorState advance_unscheduled(const SensorConfig& cfg, const SensorState& s,
                                int elapsed, bool* clamped = nullptr);

}  // namespace aoi
