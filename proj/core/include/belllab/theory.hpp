#pragma once

#include <functional>
#include <string>
#include <vector>

#include "belllab/direction.hpp"
#include "belllab/hidden_state.hpp"
#include "belllab/joint_dist.hpp"

namespace belllab {

// A candidate physical theory for the two-wing experiment: a state space,
// a distribution over it, and a probability kernel giving the joint
// outcome table at each (setting A, setting B, state).
struct Theory {
  std::string name;
  std::string description;

  // Distribution over hidden states when it does not depend on settings.
  StateEnsemble ensemble;

  // P(A, B | a, b, state). Must produce a valid table for every input in
  // the theory's setting domain.
  std::function<JointOutcomeDist(const Direction& a, const Direction& b,
                                 const HiddenState& state)>
      kernel;

  // Set only for theories whose state distribution depends on the
  // settings; maps (a, b) to the ensemble used at those settings.
  std::function<StateEnsemble(const Direction& a, const Direction& b)>
      setting_dependent_ensemble;

  // Closed-form ensemble average of the kernel, when one exists. Lets
  // sampler-backed theories report exact ensemble-level predictions.
  std::function<JointOutcomeDist(const Direction& a, const Direction& b)>
      ensemble_kernel;

  // Nonempty for theories whose kernel is only defined on a finite set of
  // settings; grids and searches must restrict to it.
  std::vector<Direction> declared_settings;
};

// Ensemble-level joint P(A, B | a, b): the weighted average of the kernel
// over `states`. Uses the setting-dependent ensemble when the theory has
// one, else the closed-form ensemble kernel when available, else the
// explicit state list.
JointOutcomeDist ensemble_average(const Theory& t, const Direction& a,
                                  const Direction& b,
                                  const std::vector<WeightedState>& states);

}  // namespace belllab
