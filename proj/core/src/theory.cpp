#include "belllab/theory.hpp"

#include "belllab/errors.hpp"

namespace belllab {

namespace {

JointOutcomeDist average_over(const Theory& t, const Direction& a,
                              const Direction& b,
                              const std::vector<WeightedState>& states) {
  if (states.empty()) {
    throw InvalidParameter("ensemble average over an empty state list");
  }
  double total = 0.0;
  // Kahan summation keeps "exactly 1/2" claims inside 1e-12 even for
  // thousand-node quadrature ensembles.
  std::array<double, 4> acc{0.0, 0.0, 0.0, 0.0};
  std::array<double, 4> comp{0.0, 0.0, 0.0, 0.0};
  for (const auto& ws : states) {
    const JointOutcomeDist k = t.kernel(a, b, ws.state);
    for (int i = 0; i < 4; ++i) {
      const double term = ws.weight * k.table()[static_cast<std::size_t>(i)] -
                          comp[static_cast<std::size_t>(i)];
      const double next = acc[static_cast<std::size_t>(i)] + term;
      comp[static_cast<std::size_t>(i)] =
          (next - acc[static_cast<std::size_t>(i)]) - term;
      acc[static_cast<std::size_t>(i)] = next;
    }
    total += ws.weight;
  }
  for (double& entry : acc) {
    entry /= total;
  }
  return JointOutcomeDist(acc[0], acc[1], acc[2], acc[3]);
}

}  // namespace

JointOutcomeDist ensemble_average(const Theory& t, const Direction& a,
                                  const Direction& b,
                                  const std::vector<WeightedState>& states) {
  if (t.setting_dependent_ensemble) {
    const StateEnsemble at_settings = t.setting_dependent_ensemble(a, b);
    if (!at_settings.is_finite()) {
      throw IncomparableEnsembles(
          "setting-dependent ensembles must be finite to average exactly");
    }
    return average_over(t, a, b, at_settings.states());
  }
  if (t.ensemble_kernel) {
    return t.ensemble_kernel(a, b);
  }
  return average_over(t, a, b, states);
}

}  // namespace belllab
