#pragma once

#include <cstdint>

#include "belllab/direction.hpp"

namespace belllab {

// Counter-based deterministic random stream. A stream is keyed by
// (seed, stream id, index); draws are a pure function of the key and the
// number of values already drawn. Streams with different keys are
// statistically independent, and a trial's draws never depend on how work
// was split across workers. The generator is a splitmix64 finalizer over
// key + counter * golden-gamma.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

  std::uint64_t next_u64();

  // Uniform on [0, 1), 53-bit resolution.
  double next_double();

  // Standard normal via Box-Muller (cosine branch); consumes exactly two
  // 64-bit draws.
  double next_normal();

  // Uniform on {0, ..., n-1}; n must be positive.
  std::uint32_t next_below(std::uint32_t n);

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Stream ids used across the library. Fixed so that results are
// reproducible from (seed, trial index) alone.
namespace streams {
inline constexpr std::uint64_t kSettingA = 0;
inline constexpr std::uint64_t kSettingB = 1;
inline constexpr std::uint64_t kState = 2;
inline constexpr std::uint64_t kOutcome = 3;
inline constexpr std::uint64_t kGridStates = 10;
inline constexpr std::uint64_t kCorrelation = 20;
}  // namespace streams

// Uniform direction on the unit sphere: a normalized triple of standard
// normal deviates. Consumes exactly six 64-bit draws.
Direction sample_unit_direction(RngStream& rng);

}  // namespace belllab
