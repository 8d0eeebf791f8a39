#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "aoi/error.hpp"

namespace aoi {

// mt19937_64 gives a bit stream pinned by the standard; the distribution
// adapters in <random> do not, so we map bits to draws by hand. Keeps
// artifacts byte-identical across toolchains.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t bits() {
    ++draws_;
    return eng_();
  }

  // [0, 1), 53-bit mantissa
  double uniform01() { return static_cast<double>(bits() >> 11) * 0x1.0p-53; }

  bool bernoulli(double p) { return uniform01() < p; }

  // weights must be non-negative and sum to ~1; residual mass goes to the
  // last index so the walk always terminates
  int categorical(const std::vector<double>& weights) {
    if (weights.empty()) throw ConfigError("categorical: empty weight vector");
    double u = uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      acc += weights[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(weights.size()) - 1;
  }

  std::uint64_t draw_count() const { return draws_; }

 private:
  std::mt19937_64 eng_;
  std::uint64_t draws_ = 0;
};

// splitmix64 step; decorrelates per-sensor substreams from a master seed
inline std::uint64_t substream_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace aoi
