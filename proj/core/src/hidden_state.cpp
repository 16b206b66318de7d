#include "belllab/hidden_state.hpp"

#include <cmath>
#include <utility>

#include "belllab/errors.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

StateEnsemble StateEnsemble::finite(std::string space_tag,
                                    std::vector<WeightedState> states) {
  double sum = 0.0;
  std::vector<WeightedState> kept;
  kept.reserve(states.size());
  for (auto& ws : states) {
    if (ws.weight < 0.0) {
      throw InvalidParameter("ensemble weights must be nonnegative");
    }
    if (ws.state.space_tag != space_tag) {
      throw InvalidParameter("ensemble state from a different state space: " +
                             ws.state.space_tag);
    }
    sum += ws.weight;
    if (ws.weight > 0.0) {
      kept.push_back(std::move(ws));
    }
  }
  if (kept.empty() || std::fabs(sum - 1.0) > kExactTol) {
    throw InvalidParameter("ensemble weights must sum to 1");
  }
  StateEnsemble e;
  e.kind_ = Kind::kFinite;
  e.space_tag_ = std::move(space_tag);
  e.states_ = std::move(kept);
  return e;
}

StateEnsemble StateEnsemble::sampler(
    std::string space_tag, std::function<HiddenState(RngStream&)> draw_fn,
    std::string moment_descriptor) {
  if (!draw_fn) {
    throw InvalidParameter("sampler ensemble requires a draw function");
  }
  StateEnsemble e;
  e.kind_ = Kind::kSampler;
  e.space_tag_ = std::move(space_tag);
  e.draw_fn_ = std::move(draw_fn);
  e.moment_descriptor_ = std::move(moment_descriptor);
  return e;
}

const std::vector<WeightedState>& StateEnsemble::states() const {
  if (kind_ != Kind::kFinite) {
    throw InvalidParameter("sampler ensembles have no enumerable state list");
  }
  return states_;
}

HiddenState StateEnsemble::draw(RngStream& rng) const {
  if (kind_ == Kind::kSampler) {
    return draw_fn_(rng);
  }
  const double u = rng.next_double();
  double cumulative = 0.0;
  for (const auto& ws : states_) {
    cumulative += ws.weight;
    if (u < cumulative) {
      return ws.state;
    }
  }
  return states_.back().state;  // u landed in the rounding gap below 1
}

double tv_distance(const StateEnsemble& p, const StateEnsemble& q) {
  if (p.space_tag() != q.space_tag()) {
    throw IncomparableEnsembles("ensembles over different state spaces: " +
                                p.space_tag() + " vs " + q.space_tag());
  }
  if (!p.is_finite() || !q.is_finite()) {
    throw IncomparableEnsembles(
        "total variation needs enumerable supports on both sides");
  }
  // Union of unique supports in deterministic order: p's states, then
  // q-only ones. Weights of repeated listings of one state aggregate.
  const auto& ps = p.states();
  const auto& qs = q.states();
  std::vector<HiddenState> support;
  auto add_unique = [&support](const HiddenState& s) {
    for (const auto& seen : support) {
      if (seen == s) {
        return;
      }
    }
    support.push_back(s);
  };
  for (const auto& ws : ps) {
    add_unique(ws.state);
  }
  for (const auto& ws : qs) {
    add_unique(ws.state);
  }
  auto weight_in = [](const std::vector<WeightedState>& list,
                      const HiddenState& s) {
    double w = 0.0;
    for (const auto& ws : list) {
      if (ws.state == s) {
        w += ws.weight;
      }
    }
    return w;
  };
  double sum = 0.0;
  for (const auto& s : support) {
    sum += std::fabs(weight_in(ps, s) - weight_in(qs, s));
  }
  return 0.5 * sum;
}

}  // namespace belllab
