#pragma once

#include <cstdio>
#include <string>

namespace aoi {

// Deterministic float formatting for emitted files. %.17g round-trips a
// double exactly; %.12g is the display precision for CSV cells.
inline std::string fmt_double(double v, const char* spec = "%.12g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

inline std::string fmt_exact(double v) { return fmt_double(v, "%.17g"); }

}  // namespace aoi
