#pragma once

#include <cstdint>
#include <string>

namespace aoi {

// FNV-1a 64-bit. Used to fingerprint resolved configurations so policy files
// can refuse to load against the wrong setup. Not cryptographic.
inline std::uint64_t fnv1a64(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string digest_hex(std::uint64_t h);

}  // namespace aoi
