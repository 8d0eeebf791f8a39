#pragma once

#include <vector>

#include "aoi/rng.hpp"

namespace aoi {

// Shared radio model. A slot is 14 mini-slots; one mini-slot carries one
// packet when the transmitter spends power[w] (chosen so the Shannon rate
// over the mini-slot equals the packet size). Channel state is i.i.d.
// across redraws with distribution channel_probs.
struct SystemParams {
  static constexpr int kSlotMinislots = 14;
  static constexpr double kMinislotSeconds = 1e-3 / 14.0;

  double bandwidth_hz = 180e3;
  int packet_bits = 8;
  std::vector<double> channel_probs;  // alpha_w, index w-1
  std::vector<double> snr_db;         // strictly increasing
  std::vector<double> snr_linear;
  std::vector<double> power;          // per mini-slot of transmission, strictly decreasing in w

  int channel_count() const { return static_cast<int>(channel_probs.size()); }
};

// Validates and fills the derived tables. Throws ConfigError.
SystemParams make_system_params(double bandwidth_hz, int packet_bits,
                                std::vector<double> channel_probs,
                                std::vector<double> snr_db);

// 5-state uniform channel, SNR -20..20 dB in 10 dB steps, 180 kHz, 8-bit packets.
SystemParams default_system_params();

// Power needed to push one packet through channel w (1-based) in one
// mini-slot. Throws InvalidChannelError for w outside 1..W.
double power_for_channel(const SystemParams& p, int w);

// Draw a channel state 1..W from channel_probs.
int sample_channel(const SystemParams& p, Rng& rng);

}  // namespace aoi
