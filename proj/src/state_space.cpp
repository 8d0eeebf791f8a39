#include "aoi/state_space.hpp"

#include <string>

#include "aoi/error.hpp"

namespace aoi {

StateSpace::StateSpace(SensorConfig cfg, int channels)
    : cfg_(cfg),
      channels_(channels),
      step_(cfg.grid_step()),
      age_levels_(cfg.age_scaled_max() / cfg.grid_step() + 1),
      queue_levels_(cfg.queue_scaled_max() / cfg.grid_step() + 1) {}

SensorState StateSpace::state(int id) const {
  int h = id % channels_;
  int g = id / channels_;
  int q = g % queue_levels_;
  g /= queue_levels_;
  int d = g % 2;
  int a = g / 2;
  return SensorState{a * step_, d == 0 ? 0 : cfg_.rate_den, q * step_, h + 1};
}

int StateSpace::grid_index(const SensorState& s) const {
  bool on_grid = s.age_scaled >= 0 && s.age_scaled <= cfg_.age_scaled_max() &&
                 s.age_scaled % step_ == 0 && s.queue_scaled >= 0 &&
                 s.queue_scaled <= cfg_.queue_scaled_max() && s.queue_scaled % step_ == 0 &&
                 (s.gap_scaled == 0 || s.gap_scaled == cfg_.rate_den);
  if (!on_grid)
    throw ConfigError("state (" + std::to_string(s.age_scaled) + "," +
                      std::to_string(s.gap_scaled) + "," + std::to_string(s.queue_scaled) +
                      ") is off the grid");
  int d = s.gap_scaled == 0 ? 0 : 1;
  return ((s.age_scaled / step_) * 2 + d) * queue_levels_ + s.queue_scaled / step_;
}

int StateSpace::id(const SensorState& s) const {
  if (s.channel < 1 || s.channel > channels_)
    throw InvalidChannelError("channel outside 1.." + std::to_string(channels_));
  return grid_index(s) * channels_ + (s.channel - 1);
}

StateSpace enumerate_states(const SystemParams& p, const SensorConfig& cfg,
                            std::int64_t state_limit) {
  validate(cfg);
  if (p.channel_count() < 1) throw ConfigError("system has no channel states");
  int step = cfg.grid_step();
  std::int64_t na = cfg.age_scaled_max() / step + 1;
  std::int64_t nq = cfg.queue_scaled_max() / step + 1;
  std::int64_t m = na * 2 * nq * p.channel_count();
  if (m > state_limit)
    throw SpaceTooLargeError("state space has " + std::to_string(m) +
                             " states, limit is " + std::to_string(state_limit));
  return StateSpace(cfg, p.channel_count());
}

std::vector<std::pair<int, double>> transition_distribution(
    const StateSpace& space, const SystemParams& p, const SensorState& s, const Action& g) {
  std::vector<std::pair<int, double>> out;
  out.reserve(p.channel_count());
  for (int w = 1; w <= p.channel_count(); ++w) {
    TransitionOutcome t = step_state(space.config(), p, s, g, w);
    out.emplace_back(space.id(t.next), p.channel_probs[w - 1]);
  }
  return out;
}

}  // namespace aoi
