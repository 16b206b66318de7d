#include "belllab/rng.hpp"

#include <cmath>

#include "belllab/errors.hpp"

namespace belllab {

namespace {

constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

// splitmix64 finalizer; bijective, passes standard statistical batteries
// when driven by a Weyl sequence.
std::uint64_t mix64(std::uint64_t x) {
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream,
                     std::uint64_t index) {
  std::uint64_t k = mix64(seed + kGamma);
  k = mix64(k ^ (stream + 0xBF58476D1CE4E5B9ULL));
  k = mix64(k ^ (index + 0x94D049BB133111EBULL));
  key_ = k;
}

std::uint64_t RngStream::next_u64() { return mix64(key_ + counter_++ * kGamma); }

double RngStream::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_normal() {
  double u1 = next_double();
  const double u2 = next_double();
  if (u1 <= 0.0) {
    u1 = 0x1.0p-53;
  }
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(2.0 * 3.14159265358979323846 * u2);
}

std::uint32_t RngStream::next_below(std::uint32_t n) {
  if (n == 0) {
    throw InvalidParameter("next_below requires n > 0");
  }
  // Multiply-shift range reduction; bias is below 2^-32 and irrelevant for
  // the trial counts used here.
  return static_cast<std::uint32_t>(
      (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
}

Direction sample_unit_direction(RngStream& rng) {
  const double gx = rng.next_normal();
  const double gy = rng.next_normal();
  const double gz = rng.next_normal();
  const double norm = std::sqrt(gx * gx + gy * gy + gz * gz);
  if (!(norm > 1e-12)) {
    // Probability ~2^-150; keeps the draw count fixed at six.
    return Direction(0.0, 0.0, 1.0);
  }
  return Direction::normalized(gx, gy, gz);
}

}  // namespace belllab
