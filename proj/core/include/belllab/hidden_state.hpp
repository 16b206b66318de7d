#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "belllab/direction.hpp"
#include "belllab/outcome.hpp"
#include "belllab/rng.hpp"

namespace belllab {

// Payload of a hidden state. The shape is fixed per state space:
//   monostate    - state spaces with a single featureless point
//   Direction    - e.g. a shared spin axis
//   int64        - e.g. a partition cell or strategy index
//   OutcomePair  - pre-assigned outcomes
using StatePayload =
    std::variant<std::monostate, Direction, std::int64_t, OutcomePair>;

// One complete state of the particle pair. `space_tag` identifies the
// state space the payload belongs to; payload shapes are only comparable
// within one tag.
struct HiddenState {
  std::string space_tag;
  StatePayload payload;

  bool operator==(const HiddenState&) const = default;
};

struct WeightedState {
  HiddenState state;
  double weight;
};

// Distribution over hidden states: either an explicit finite list of
// weighted states or a seeded sampler.
class StateEnsemble {
 public:
  enum class Kind { kFinite, kSampler };

  // Empty placeholder so aggregates holding an ensemble can be default
  // constructed; not a valid ensemble until assigned.
  StateEnsemble() = default;

  // Weights must be nonnegative and sum to 1 within 1e-12; zero-weight
  // states are dropped.
  static StateEnsemble finite(std::string space_tag,
                              std::vector<WeightedState> states);

  // `moment_descriptor` names the exact law when one exists (for example
  // "uniform-sphere"); it is informational only.
  static StateEnsemble sampler(std::string space_tag,
                               std::function<HiddenState(RngStream&)> draw_fn,
                               std::string moment_descriptor = "");

  Kind kind() const { return kind_; }
  bool is_finite() const { return kind_ == Kind::kFinite; }
  const std::string& space_tag() const { return space_tag_; }
  const std::string& moment_descriptor() const { return moment_descriptor_; }

  // Finite ensembles only.
  const std::vector<WeightedState>& states() const;

  // Finite: inverse-CDF over the states in declared order (one draw).
  // Sampler: delegates to the sampler function.
  HiddenState draw(RngStream& rng) const;

 private:
  Kind kind_ = Kind::kFinite;
  std::string space_tag_;
  std::vector<WeightedState> states_;
  std::function<HiddenState(RngStream&)> draw_fn_;
  std::string moment_descriptor_;
};

// Total variation distance between two finite ensembles over the same
// state space. Throws IncomparableEnsembles when the tags differ or
// either ensemble has no enumerable support.
double tv_distance(const StateEnsemble& p, const StateEnsemble& q);

}  // namespace belllab
