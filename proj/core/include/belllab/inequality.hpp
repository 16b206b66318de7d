#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "belllab/theory.hpp"

namespace belllab {

// The four settings of a CHSH evaluation.
struct ChshSettings {
  Direction a{0, 0, 1};
  Direction a_prime{0, 0, 1};
  Direction b{0, 0, 1};
  Direction b_prime{0, 0, 1};

  // Coplanar settings from plane angles in radians.
  static ChshSettings from_plane_angles(double a, double a_prime, double b,
                                        double b_prime);

  // The angles maximizing |S| for the singlet: a=0, a'=90, b=45, b'=135
  // degrees, coplanar.
  static ChshSettings standard();
};

struct CorrelationOptions {
  std::int64_t mc_samples = 65536;
  std::uint64_t seed = 1729;
};

// E[A*B] at one setting pair, tagged with how it was computed. std_error
// is 0 for the exact and analytic methods.
struct CorrelationEstimate {
  double value = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
  std::string method;  // "exact", "analytic", or "monte-carlo"
};

// Ensemble correlation at (a, b). Exact for finite ensembles (including
// setting-dependent finite laws); analytic for sampler ensembles with a
// closed-form ensemble kernel; otherwise a seeded Monte Carlo average of
// the per-state expectation with a reported standard error.
CorrelationEstimate correlation(const Theory& t, const Direction& a,
                                const Direction& b,
                                const CorrelationOptions& options = {});

// S = E(a,b) - E(a,b') + E(a',b) + E(a',b').
struct ChshResult {
  double s = 0.0;
  std::array<CorrelationEstimate, 4> terms;  // ab, ab', a'b, a'b'
};

ChshResult chsh_value(const Theory& t, const ChshSettings& settings,
                      const CorrelationOptions& options = {});

// Exhaustive search for the largest |S|. Theories with declared settings
// are searched over all quadruples of those; otherwise over coplanar
// quadruples at multiples of `resolution` (default pi/16).
struct ChshSearchResult {
  ChshSettings settings;
  std::array<double, 4> plane_angles{};  // radians; meaningful for coplanar search
  double s = 0.0;
  double abs_s = 0.0;
};

ChshSearchResult chsh_search(const Theory& t, double resolution = 0.0,
                             const CorrelationOptions& options = {});

// Largest |S| any local deterministic strategy mixture can reach with
// n_a settings on one wing and n_b on the other, by brute-force
// enumeration of all 2^(n_a+n_b) deterministic strategies (mixtures cannot
// beat the best pure strategy, so enumerating pure ones is exhaustive).
// Requires n_a, n_b >= 2; throws ResourceLimit when the strategy count
// exceeds 2^24.
double lhv_bound_bruteforce(int n_a, int n_b);

}  // namespace belllab
