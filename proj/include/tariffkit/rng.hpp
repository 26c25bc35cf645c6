#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace tariffkit {

// Stream splitting: every random quantity is drawn from its own
// std::mt19937_64 engine, seeded with derive_seed(top_seed, stream...).
//
//   splitmix64(x)            standard SplitMix64 finalizer
//   derive_seed(s, a)        = splitmix64(s ^ splitmix64(a + 0x9E3779B97F4A7C15))
//   derive_seed(s, a, b)     = derive_seed(derive_seed(s, a), b)
//
// Streams used by the generators (see docs/rng.md):
//   panel:  kStreamExposure, kStreamStateEffect, kStreamYearEffect, kStreamNoise
//   var:    kStreamVarShocks
//   iv:     kStreamIv
//   instrument attachment uses the caller's seed with kStreamInstrument
//   Monte Carlo replication r uses derive_seed(seed, kStreamReplication, r)
inline constexpr std::uint64_t kStreamExposure = 1;
inline constexpr std::uint64_t kStreamStateEffect = 2;
inline constexpr std::uint64_t kStreamYearEffect = 3;
inline constexpr std::uint64_t kStreamNoise = 4;
inline constexpr std::uint64_t kStreamVarShocks = 5;
inline constexpr std::uint64_t kStreamInstrument = 6;
inline constexpr std::uint64_t kStreamIv = 7;
inline constexpr std::uint64_t kStreamReplication = 8;

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(seed ^ splitmix64(stream + 0x9E3779B97F4A7C15ULL));
}

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream,
                                    std::uint64_t index) {
  return derive_seed(derive_seed(seed, stream), index);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Always consumes one standard-normal draw, so stream alignment does not
  // depend on sd (sd == 0 returns mean exactly).
  double normal(double mean = 0.0, double sd = 1.0) {
    const double z = std::normal_distribution<double>(0.0, 1.0)(engine_);
    return mean + sd * z;
  }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace tariffkit
