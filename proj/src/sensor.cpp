#include "aoi/sensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "aoi/error.hpp"

namespace aoi {

int SensorConfig::grid_step() const { return std::gcd(rate_num, rate_den); }

int default_age_cap(int rate_num, int rate_den, int queue_cap) {
  // ceil(2 * queue_cap / rate) with integers
  return (2 * queue_cap * rate_den + rate_num - 1) / rate_num;
}

SensorConfig make_sensor_config(int lambda_tenths, int queue_cap, int age_cap,
                                double sampling_cost, double energy_budget) {
  // the age-cap default divides by the rate, so bound it before deriving
  if (lambda_tenths < 1 || lambda_tenths > 10)
    throw ConfigError("sampling rate must be in (0, 1] packets per mini-slot");
  if (queue_cap < 1) throw ConfigError("queue_cap must be at least 1 packet");
  SensorConfig cfg;
  cfg.rate_num = lambda_tenths;
  cfg.rate_den = 10;
  cfg.queue_cap = queue_cap;
  cfg.age_cap = age_cap > 0 ? age_cap : default_age_cap(lambda_tenths, 10, queue_cap);
  cfg.sampling_cost = sampling_cost;
  cfg.energy_budget = energy_budget;
  validate(cfg);
  return cfg;
}

void validate(const SensorConfig& cfg) {
  if (cfg.rate_den != 10 && cfg.rate_den != 100)
    throw ConfigError("rate_den must be 10 or 100");
  if (cfg.rate_num < 1 || cfg.rate_num > cfg.rate_den)
    throw ConfigError("sampling rate must be in (0, 1] packets per mini-slot");
  if (cfg.queue_cap < 1) throw ConfigError("queue_cap must be at least 1 packet");
  if (cfg.age_cap < 1) throw ConfigError("age_cap must be at least 1 mini-slot");
  if (cfg.sampling_cost < 0) throw ConfigError("sampling_cost must be non-negative");
  if (cfg.energy_budget <= 0) throw ConfigError("energy_budget must be positive");
}

int whole_packets(const SensorConfig& cfg, const SensorState& s) {
  return s.queue_scaled / cfg.rate_den;
}

std::vector<Action> feasible_actions(const SensorConfig& cfg, const SensorState& s) {
  std::vector<Action> out;
  int kmax = std::min(SystemParams::kSlotMinislots, whole_packets(cfg, s));
  out.reserve(1 + std::max(kmax, 0));
  out.push_back({0, 1});
  for (int k = 1; k <= kmax; ++k) out.push_back({1, k});
  return out;
}

double epoch_reward(const SensorConfig& cfg, const SensorState& s) {
  return static_cast<double>(s.age_scaled + s.gap_scaled) / cfg.rate_num;
}

double epoch_cost(const SensorConfig& cfg, const SystemParams& p,
                  const SensorState& s, const Action& g) {
  double c = cfg.sampling_cost * cfg.rate() * g.minislots;
  if (g.transmit) c += power_for_channel(p, s.channel) * g.minislots;
  return c;
}

namespace {
int clamp_track(long v, int lo, int hi, bool* clamped) {
  if (v < lo) { if (clamped) *clamped = true; return lo; }
  if (v > hi) { if (clamped) *clamped = true; return hi; }
  return static_cast<int>(v);
}
}  // namespace

SensorState advance_unscheduled(const SensorConfig& cfg, const SensorState& s,
                                int elapsed, bool* clamped) {
  SensorState n = s;
  long grow = static_cast<long>(cfg.rate_num) * elapsed;
  n.age_scaled = clamp_track(s.age_scaled + grow, 0, cfg.age_scaled_max(), clamped);
  n.queue_scaled = clamp_track(s.queue_scaled + grow, 0, cfg.queue_scaled_max(), clamped);
  return n;
}

TransitionOutcome step_state(const SensorConfig& cfg, const SystemParams& p,
                             const SensorState& s, const Action& g, int next_channel) {
  if (next_channel < 1 || next_channel > p.channel_count())
    throw InvalidChannelError("next_channel outside 1.." + std::to_string(p.channel_count()));
  if (g.minislots < 1 || g.minislots > SystemParams::kSlotMinislots)
    throw InfeasibleActionError("minislots must be in 1..14");
  if (!g.transmit && g.minislots != 1)
    throw InfeasibleActionError("idle epochs span exactly one mini-slot");

  TransitionOutcome out;
  out.reward = epoch_reward(cfg, s);
  out.cost = epoch_cost(cfg, p, s, g);

  if (!g.transmit) {
    out.next = advance_unscheduled(cfg, s, 1, &out.clamped);
  } else {
    int have = whole_packets(cfg, s);
    if (have < 1)
      throw InfeasibleActionError("transmit scheduled with no whole packet queued");
    int sent = std::min(g.minislots, have);  // cap is defensive: feasible k never exceeds it
    long grow = static_cast<long>(cfg.rate_num) * g.minislots;
    long served = static_cast<long>(cfg.rate_den) * sent;
    out.packets_sent = sent;
    out.next.age_scaled =
        clamp_track(s.age_scaled + grow - served, 0, cfg.age_scaled_max(), &out.clamped);
    out.next.gap_scaled = cfg.rate_den;
    out.next.queue_scaled =
        clamp_track(s.queue_scaled + grow - served, 0, cfg.queue_scaled_max(), &out.clamped);
  }
  out.next.channel = next_channel;
  return out;
}

}  // namespace aoi
