#pragma once

#include <string>

#include "aoi/config.hpp"

namespace aoi {

// Plain-text policy artifact: format version, config digest, solve settings,
// multiplier trace, theta, and both action tables keyed by the scaled state
// tuple. Doubles are written with %.17g so a round-trip is lossless.
inline constexpr int kPolicyFormatVersion = 1;

std::string policy_file_text(const MixedPolicy& mp, const std::string& digest,
                             const SolverSettings& settings);
void write_policy_file(const std::string& path, const MixedPolicy& mp,
                       const std::string& digest, const SolverSettings& settings);

// Rebuilds the mixture against the given space (from the current config) and
// verifies the stored digest matches expected_digest. Mismatched digest,
// version, grid, or malformed rows throw ConfigError.
MixedPolicy read_policy_file(const std::string& path, const StateSpace& space,
                             const std::string& expected_digest);

}  // namespace aoi
