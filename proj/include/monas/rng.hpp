#pragma once

#include <cstdint>
#include <random>

namespace monas {

// splitmix64 finalizer; good avalanche, used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Labels for the independent RNG streams derived from one master seed.
enum class Stream : std::uint64_t {
  kInitPopulation = 1,
  kTaskAssignment = 2,
  kPreference = 3,
  kTaskNoise = 4,
  kMateShuffle = 5,
  kOffspringPair = 6,
};

// Engine for (seed, stream, a, b). Derivation is counter-based, so any
// component (a task, a generation, a parent pair) gets its own stream and
// determinism is independent of thread schedule and call order.
inline std::mt19937_64 make_engine(std::uint64_t seed, Stream stream,
                                   std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t s = splitmix64(seed);
  s = splitmix64(s ^ static_cast<std::uint64_t>(stream));
  s = splitmix64(s ^ a);
  s = splitmix64(s ^ b);
  return std::mt19937_64(s);
}

}  // namespace monas
