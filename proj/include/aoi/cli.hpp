#pragma once

#include <string>
#include <vector>

namespace aoi::cli {

// Exit codes: 0 ok, 2 invalid config or usage, 3 infeasible, 4 internal.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitInfeasible = 3;
inline constexpr int kExitInternal = 4;

// argv-style entry point, also used in-process by tests. Writes artifacts
// under --out only after solving/parsing succeeded (no partial files on
// config errors).
int run(const std::vector<std::string>& args);
int run(int argc, char** argv);

}  // namespace aoi::cli
