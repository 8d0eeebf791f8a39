#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "aoi/sensor.hpp"

namespace aoi {

// Cartesian grid closed under step_state:
//   age_scaled   in {0, g, 2g, ..., age_cap * rate_num}
//   gap_scaled   in {0, rate_den}
//   queue_scaled in {0, g, ..., rate_den * queue_cap}
//   channel      in 1..W
// with g = gcd(rate_num, rate_den). Ids place the channel fastest so the W
// successors of any (state, action) are consecutive.
class StateSpace {
 public:
  StateSpace() = default;
  StateSpace(SensorConfig cfg, int channels);

  const SensorConfig& config() const { return cfg_; }
  int channels() const { return channels_; }
  int age_levels() const { return age_levels_; }
  int queue_levels() const { return queue_levels_; }

  int size() const { return age_levels_ * 2 * queue_levels_ * channels_; }
  int grid_count() const { return age_levels_ * 2 * queue_levels_; }  // states per channel

  SensorState state(int id) const;
  int id(const SensorState& s) const;         // throws ConfigError off-grid
  int grid_index(const SensorState& s) const; // id / W
  int id_from_grid(int grid, int channel) const { return grid * channels_ + (channel - 1); }

  // first id of the canonical start (age 0, gap 0, queue 0); add w-1 for channel w
  int start_id(int channel) const { return channel - 1; }

 private:
  SensorConfig cfg_;
  int channels_ = 0;
  int step_ = 1;
  int age_levels_ = 0;
  int queue_levels_ = 0;
};

// Builds the grid, refusing to enumerate more than state_limit states.
StateSpace enumerate_states(const SystemParams& p, const SensorConfig& cfg,
                            std::int64_t state_limit = 1'000'000);

// The W successor states of (s, g) with their probabilities (channel redraw
// per epoch). Entry order follows the successor channel.
std::vector<std::pair<int, double>> transition_distribution(
    const StateSpace& space, const SystemParams& p, const SensorState& s, const Action& g);

}  // namespace aoi
