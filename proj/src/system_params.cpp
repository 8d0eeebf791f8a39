#include "aoi/system_params.hpp"

#include <cmath>

#include "aoi/error.hpp"
#include "aoi/format.hpp"

namespace aoi {

SystemParams make_system_params(double bandwidth_hz, int packet_bits,
                                std::vector<double> channel_probs,
                                std::vector<double> snr_db) {
  if (bandwidth_hz <= 0) throw ConfigError("bandwidth_hz must be positive");
  if (packet_bits < 1) throw ConfigError("packet_bits must be at least 1");
  if (channel_probs.empty()) throw ConfigError("need at least one channel state");
  if (snr_db.size() != channel_probs.size())
    throw ConfigError("snr_db and channel_probs must have the same length");

  double sum = 0.0;
  for (double a : channel_probs) {
    if (a < 0) throw ConfigError("channel probabilities must be non-negative");
    sum += a;
  }
  if (std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("channel probabilities must sum to 1, got " + fmt_double(sum));
  for (std::size_t i = 1; i < snr_db.size(); ++i)
    if (!(snr_db[i] > snr_db[i - 1]))
      throw ConfigError("snr_db must be strictly increasing");

  SystemParams p;
  p.bandwidth_hz = bandwidth_hz;
  p.packet_bits = packet_bits;
  p.channel_probs = std::move(channel_probs);
  p.snr_db = std::move(snr_db);

  // one packet in one mini-slot at the Shannon rate: B*dt*log2(1+snr*pw) = bits
  double exponent = packet_bits / (bandwidth_hz * SystemParams::kMinislotSeconds);
  double numer = std::exp2(exponent) - 1.0;
  p.snr_linear.reserve(p.snr_db.size());
  p.power.reserve(p.snr_db.size());
  for (double db : p.snr_db) {
    double lin = std::pow(10.0, db / 10.0);
    p.snr_linear.push_back(lin);
    p.power.push_back(numer / lin);
  }
  return p;
}

SystemParams default_system_params() {
  return make_system_params(180e3, 8, {0.2, 0.2, 0.2, 0.2, 0.2}, {-20, -10, 0, 10, 20});
}

double power_for_channel(const SystemParams& p, int w) {
  if (w < 1 || w > p.channel_count())
    throw InvalidChannelError("channel index " + std::to_string(w) + " outside 1.." +
                              std::to_string(p.channel_count()));
  return p.power[w - 1];
}

int sample_channel(const SystemParams& p, Rng& rng) {
  return rng.categorical(p.channel_probs) + 1;
}

}  // namespace aoi
