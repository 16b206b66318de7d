#include "belllab/inequality.hpp"

#include <cmath>
#include <vector>

#include "belllab/errors.hpp"
#include "belllab/rng.hpp"

namespace belllab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double exact_mixture_expectation(const Theory& t,
                                 const std::vector<WeightedState>& states,
                                 const Direction& a, const Direction& b) {
  double value = 0.0;
  double total = 0.0;
  for (const auto& ws : states) {
    value += ws.weight * t.kernel(a, b, ws.state).expectation_product();
    total += ws.weight;
  }
  return value / total;
}

}  // namespace

ChshSettings ChshSettings::from_plane_angles(double a, double a_prime,
                                             double b, double b_prime) {
  return ChshSettings{
      Direction::from_plane_angle(a), Direction::from_plane_angle(a_prime),
      Direction::from_plane_angle(b), Direction::from_plane_angle(b_prime)};
}

ChshSettings ChshSettings::standard() {
  return from_plane_angles(0.0, kPi / 2.0, kPi / 4.0, 3.0 * kPi / 4.0);
}

CorrelationEstimate correlation(const Theory& t, const Direction& a,
                                const Direction& b,
                                const CorrelationOptions& options) {
  CorrelationEstimate e;
  if (t.setting_dependent_ensemble) {
    const StateEnsemble at_settings = t.setting_dependent_ensemble(a, b);
    if (at_settings.is_finite()) {
      e.value = exact_mixture_expectation(t, at_settings.states(), a, b);
      e.samples = static_cast<std::int64_t>(at_settings.states().size());
      e.method = "exact";
      return e;
    }
  } else if (t.ensemble.is_finite()) {
    e.value = exact_mixture_expectation(t, t.ensemble.states(), a, b);
    e.samples = static_cast<std::int64_t>(t.ensemble.states().size());
    e.method = "exact";
    return e;
  } else if (t.ensemble_kernel) {
    e.value = t.ensemble_kernel(a, b).expectation_product();
    e.method = "analytic";
    return e;
  }
  // Seeded Monte Carlo over states; each sample contributes the exact
  // per-state expectation, so only the state draw adds variance.
  if (options.mc_samples < 2) {
    throw InvalidParameter("monte carlo correlation needs >= 2 samples");
  }
  const StateEnsemble& source = t.setting_dependent_ensemble
                                    ? t.setting_dependent_ensemble(a, b)
                                    : t.ensemble;
  double sum = 0.0;
  double sum_sq = 0.0;
  for (std::int64_t i = 0; i < options.mc_samples; ++i) {
    RngStream rng(options.seed, streams::kCorrelation,
                  static_cast<std::uint64_t>(i));
    const HiddenState s = source.draw(rng);
    const double x = t.kernel(a, b, s).expectation_product();
    sum += x;
    sum_sq += x * x;
  }
  const double n = static_cast<double>(options.mc_samples);
  const double mean = sum / n;
  const double var = std::max(0.0, (sum_sq - n * mean * mean) / (n - 1.0));
  e.value = mean;
  e.std_error = std::sqrt(var / n);
  e.samples = options.mc_samples;
  e.method = "monte-carlo";
  return e;
}

ChshResult chsh_value(const Theory& t, const ChshSettings& settings,
                      const CorrelationOptions& options) {
  ChshResult r;
  r.terms[0] = correlation(t, settings.a, settings.b, options);
  r.terms[1] = correlation(t, settings.a, settings.b_prime, options);
  r.terms[2] = correlation(t, settings.a_prime, settings.b, options);
  r.terms[3] = correlation(t, settings.a_prime, settings.b_prime, options);
  r.s = r.terms[0].value - r.terms[1].value + r.terms[2].value +
        r.terms[3].value;
  return r;
}

ChshSearchResult chsh_search(const Theory& t, double resolution,
                             const CorrelationOptions& options) {
  ChshSearchResult best;
  if (!t.declared_settings.empty()) {
    // Finite setting domain: search every quadruple of declared settings.
    const auto& s = t.declared_settings;
    const std::size_t n = s.size();
    std::vector<double> e(n * n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        e[i * n + j] = correlation(t, s[i], s[j], options).value;
      }
    }
    best.abs_s = -1.0;
    for (std::size_t ia = 0; ia < n; ++ia) {
      for (std::size_t iap = 0; iap < n; ++iap) {
        for (std::size_t ib = 0; ib < n; ++ib) {
          for (std::size_t ibp = 0; ibp < n; ++ibp) {
            const double sv = e[ia * n + ib] - e[ia * n + ibp] +
                              e[iap * n + ib] + e[iap * n + ibp];
            if (std::fabs(sv) > best.abs_s) {
              best.abs_s = std::fabs(sv);
              best.s = sv;
              best.settings = ChshSettings{s[ia], s[iap], s[ib], s[ibp]};
              best.plane_angles = {};
            }
          }
        }
      }
    }
    return best;
  }
  if (resolution <= 0.0) {
    resolution = kPi / 16.0;
  }
  const int n = std::max(1, static_cast<int>(std::floor(
                                2.0 * kPi / resolution + 0.5)));
  std::vector<double> angles(static_cast<std::size_t>(n));
  std::vector<Direction> dirs;
  dirs.reserve(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    angles[static_cast<std::size_t>(k)] = k * resolution;
    dirs.push_back(
        Direction::from_plane_angle(angles[static_cast<std::size_t>(k)]));
  }
  std::vector<double> e(static_cast<std::size_t>(n * n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      e[static_cast<std::size_t>(i * n + j)] =
          correlation(t, dirs[static_cast<std::size_t>(i)],
                      dirs[static_cast<std::size_t>(j)], options)
              .value;
    }
  }
  best.abs_s = -1.0;
  for (int ia = 0; ia < n; ++ia) {
    for (int iap = 0; iap < n; ++iap) {
      for (int ib = 0; ib < n; ++ib) {
        for (int ibp = 0; ibp < n; ++ibp) {
          const double sv = e[static_cast<std::size_t>(ia * n + ib)] -
                            e[static_cast<std::size_t>(ia * n + ibp)] +
                            e[static_cast<std::size_t>(iap * n + ib)] +
                            e[static_cast<std::size_t>(iap * n + ibp)];
          if (std::fabs(sv) > best.abs_s) {
            best.abs_s = std::fabs(sv);
            best.s = sv;
            best.settings = ChshSettings{
                dirs[static_cast<std::size_t>(ia)],
                dirs[static_cast<std::size_t>(iap)],
                dirs[static_cast<std::size_t>(ib)],
                dirs[static_cast<std::size_t>(ibp)]};
            best.plane_angles = {angles[static_cast<std::size_t>(ia)],
                                 angles[static_cast<std::size_t>(iap)],
                                 angles[static_cast<std::size_t>(ib)],
                                 angles[static_cast<std::size_t>(ibp)]};
          }
        }
      }
    }
  }
  return best;
}

double lhv_bound_bruteforce(int n_a, int n_b) {
  if (n_a < 2 || n_b < 2) {
    throw InvalidParameter("lhv bound needs >= 2 settings per wing");
  }
  if (n_a + n_b > 24) {
    throw ResourceLimit("strategy enumeration would exceed 2^24");
  }
  // Deterministic strategies are +-1 assignments per setting; the best
  // mixture is attained at a pure strategy, so enumerating assignments is
  // exhaustive. All arithmetic stays integral.
  int best = 0;
  const std::uint32_t strategies_a = 1u << n_a;
  const std::uint32_t strategies_b = 1u << n_b;
  auto sign = [](std::uint32_t bits, int i) {
    return (bits >> i) & 1u ? 1 : -1;
  };
  for (std::uint32_t sa = 0; sa < strategies_a; ++sa) {
    for (std::uint32_t sb = 0; sb < strategies_b; ++sb) {
      for (int ia = 0; ia < n_a; ++ia) {
        for (int iap = 0; iap < n_a; ++iap) {
          for (int ib = 0; ib < n_b; ++ib) {
            for (int ibp = 0; ibp < n_b; ++ibp) {
              const int s = sign(sa, ia) * sign(sb, ib) -
                            sign(sa, ia) * sign(sb, ibp) +
                            sign(sa, iap) * sign(sb, ib) +
                            sign(sa, iap) * sign(sb, ibp);
              if (std::abs(s) > best) {
                best = std::abs(s);
              }
            }
          }
        }
      }
    }
  }
  return static_cast<double>(best);
}

}  // namespace belllab
