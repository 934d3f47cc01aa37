#pragma once

#include <cstdint>
#include <random>

namespace fracp {

// All randomized drivers derive their generators from one master seed plus a
// stream id, so adding or reordering call sites never perturbs other streams.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline std::mt19937_64 seeded_stream(std::uint64_t seed, std::uint64_t stream) {
  return std::mt19937_64(splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x632be59bd9b4e019ULL + 1)));
}

}  // namespace fracp
