#include "belllab/theories.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <utility>

#include "belllab/errors.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

namespace {

constexpr double kPi = 3.14159265358979323846;

double clamped_dot(const Direction& a, const Direction& b) {
  return std::clamp(dot(a, b), -1.0, 1.0);
}

// sign(0) is +1 by convention; the tie has measure zero under every
// ensemble used here, and a fixed convention keeps kernels deterministic.
Outcome sign_outcome(double x) {
  return x >= 0.0 ? Outcome::plus() : Outcome::minus();
}

JointOutcomeDist singlet_table(const Direction& a, const Direction& b) {
  const double d = clamped_dot(a, b);
  const double same = (1.0 - d) / 4.0;
  const double diff = (1.0 + d) / 4.0;
  return JointOutcomeDist(same, diff, diff, same);
}

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on the
// Legendre recurrence. Weights sum to 2; nodes are symmetric about 0 and
// exclude 0 for even n.
void gauss_legendre(int n, std::vector<double>& nodes,
                    std::vector<double>& weights) {
  nodes.assign(static_cast<std::size_t>(n), 0.0);
  weights.assign(static_cast<std::size_t>(n), 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double step = p1 / dp;
      x -= step;
      if (std::fabs(step) < 1e-15) {
        break;
      }
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes[static_cast<std::size_t>(i)] = -x;
    weights[static_cast<std::size_t>(i)] = w;
    nodes[static_cast<std::size_t>(n - 1 - i)] = x;
    weights[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

const std::string kClassicalTag = "classical-antiparallel";

JointOutcomeDist classical_kernel(const Direction& a, const Direction& b,
                                  const HiddenState& state) {
  const Direction* spin = std::get_if<Direction>(&state.payload);
  if (spin == nullptr || state.space_tag != kClassicalTag) {
    throw InvalidParameter(
        "classical anti-parallel kernel expects a spin-axis state");
  }
  // Wing A sees spin +s, wing B the anti-parallel partner -s.
  const Outcome oa = sign_outcome(dot(a, *spin));
  const Outcome ob = sign_outcome(-dot(b, *spin));
  return JointOutcomeDist::point_mass(oa, ob);
}

int resolve_setting(const std::vector<Direction>& settings,
                    const Direction& d) {
  for (std::size_t i = 0; i < settings.size(); ++i) {
    if (angle_between(settings[i], d) <= kAnalyticTol) {
      return static_cast<int>(i);
    }
  }
  throw InvalidParameter(
      "setting is not in the theory's declared setting list");
}

}  // namespace

Theory qm_singlet_theory() {
  const std::string tag = "qm-singlet";
  Theory t;
  t.name = tag;
  t.description = "quantum singlet predictions, no hidden structure";
  t.ensemble = StateEnsemble::finite(
      tag, {WeightedState{HiddenState{tag, std::monostate{}}, 1.0}});
  t.kernel = [](const Direction& a, const Direction& b, const HiddenState&) {
    return singlet_table(a, b);
  };
  return t;
}

ClassicalMode ClassicalMode::sampler(std::uint64_t seed) {
  ClassicalMode m;
  m.kind = Kind::kSampler;
  m.seed = seed;
  return m;
}

ClassicalMode ClassicalMode::quadrature(int n_polar) {
  ClassicalMode m;
  m.kind = Kind::kQuadrature;
  m.n_polar = n_polar;
  return m;
}

JointOutcomeDist classical_antiparallel_joint(const Direction& a,
                                              const Direction& b) {
  // p(+,+) = measure of {s : a.s >= 0 and b.s <= 0}, a lune of angle
  // theta(a, b). The complementary entries are built as 0.5 - q so the
  // wing marginals come out exactly 1/2.
  const double q = angle_between(a, b) / (2.0 * kPi);
  const double r = 0.5 - q;
  return JointOutcomeDist(q, r, r, q);
}

Theory classical_antiparallel_theory(ClassicalMode mode) {
  Theory t;
  t.name = kClassicalTag;
  t.description =
      "anti-parallel spin pair, deterministic sign readout per wing";
  t.kernel = classical_kernel;
  if (mode.kind == ClassicalMode::Kind::kSampler) {
    t.ensemble = StateEnsemble::sampler(
        kClassicalTag,
        [](RngStream& rng) {
          return HiddenState{kClassicalTag, sample_unit_direction(rng)};
        },
        "uniform-sphere");
    t.ensemble_kernel = classical_antiparallel_joint;
    return t;
  }
  const int n = mode.n_polar;
  if (n < 2 || n % 2 != 0) {
    throw InvalidParameter(
        "quadrature mode needs an even polar node count >= 2");
  }
  std::vector<double> z;
  std::vector<double> wz;
  gauss_legendre(n, z, wz);
  const int m = 2 * n;
  std::vector<WeightedState> states;
  states.reserve(static_cast<std::size_t>(n * m));
  for (int i = 0; i < n; ++i) {
    const double zi = z[static_cast<std::size_t>(i)];
    const double radius = std::sqrt(std::max(0.0, 1.0 - zi * zi));
    // Midpoint azimuth offsets keep axis-aligned settings off the nodes;
    // phi -> phi + pi maps nodes to nodes, so the set stays antipodally
    // symmetric together with the +-z symmetry of the polar rule.
    const double w = wz[static_cast<std::size_t>(i)] / 2.0 / m;
    for (int j = 0; j < m; ++j) {
      const double phi = (j + 0.5) * 2.0 * kPi / m;
      states.push_back(WeightedState{
          HiddenState{kClassicalTag,
                      Direction::normalized(radius * std::cos(phi),
                                            radius * std::sin(phi), zi)},
          w});
    }
  }
  // Normalize away the quadrature rule's own rounding so the weights meet
  // the ensemble invariant exactly.
  double sum = 0.0;
  for (const auto& ws : states) {
    sum += ws.weight;
  }
  for (auto& ws : states) {
    ws.weight /= sum;
  }
  t.ensemble = StateEnsemble::finite(kClassicalTag, std::move(states));
  return t;
}

Theory maudlin_tachyon_theory() {
  const std::string tag = "maudlin-tachyon";
  Theory t;
  t.name = tag;
  t.description =
      "wing B flips a fair coin, wing A matches the singlet conditional";
  t.ensemble = StateEnsemble::finite(
      tag, {WeightedState{HiddenState{tag, std::monostate{}}, 1.0}});
  t.kernel = [](const Direction& a, const Direction& b, const HiddenState&) {
    const double d = clamped_dot(a, b);
    const double coin = 0.5;
    auto conditional = [d](Outcome oa, Outcome ob) {
      return (1.0 - oa.value() * ob.value() * d) / 2.0;
    };
    return JointOutcomeDist(
        coin * conditional(Outcome::plus(), Outcome::plus()),
        coin * conditional(Outcome::plus(), Outcome::minus()),
        coin * conditional(Outcome::minus(), Outcome::plus()),
        coin * conditional(Outcome::minus(), Outcome::minus()));
  };
  return t;
}

Theory einstein_boxes_theory(int n_counters) {
  if (n_counters < 2) {
    throw InvalidParameter("einstein-boxes needs at least 2 counters");
  }
  const std::string tag = "einstein-boxes";
  Theory t;
  t.name = tag;
  t.description =
      "one particle over n boxes; counters on the first two boxes";
  t.ensemble = StateEnsemble::finite(
      tag, {WeightedState{HiddenState{tag, std::monostate{}}, 1.0}});
  const double hit = 1.0 / n_counters;
  // Exactly one counter can register: (+,+) never happens; (-,-) is the
  // particle landing in one of the n-2 unwatched boxes.
  t.kernel = [hit](const Direction&, const Direction&, const HiddenState&) {
    return JointOutcomeDist(0.0, hit, hit, 1.0 - 2.0 * hit);
  };
  return t;
}

Theory deterministic_lhv_theory(std::vector<Direction> settings,
                                std::vector<LhvStrategy> strategies) {
  if (settings.empty()) {
    throw InvalidParameter("lhv theory needs a nonempty setting list");
  }
  if (strategies.empty()) {
    throw InvalidParameter("lhv theory needs at least one strategy");
  }
  const std::string tag = "lhv-deterministic";
  std::vector<WeightedState> states;
  for (std::size_t i = 0; i < strategies.size(); ++i) {
    const auto& s = strategies[i];
    if (s.outcomes_a.size() != settings.size() ||
        s.outcomes_b.size() != settings.size()) {
      throw InvalidParameter(
          "every strategy must assign an outcome to every declared setting");
    }
    states.push_back(WeightedState{
        HiddenState{tag, static_cast<std::int64_t>(i)}, s.weight});
  }
  auto shared_settings =
      std::make_shared<const std::vector<Direction>>(std::move(settings));
  auto shared_strategies =
      std::make_shared<const std::vector<LhvStrategy>>(std::move(strategies));
  Theory t;
  t.name = tag;
  t.description = "mixture of deterministic local response strategies";
  t.ensemble = StateEnsemble::finite(tag, std::move(states));
  t.declared_settings = *shared_settings;
  t.kernel = [shared_settings, shared_strategies, tag](
                 const Direction& a, const Direction& b,
                 const HiddenState& state) {
    const std::int64_t* idx = std::get_if<std::int64_t>(&state.payload);
    if (idx == nullptr || state.space_tag != tag ||
        *idx < 0 ||
        *idx >= static_cast<std::int64_t>(shared_strategies->size())) {
      throw InvalidParameter("lhv kernel expects a strategy-index state");
    }
    const auto& strat = (*shared_strategies)[static_cast<std::size_t>(*idx)];
    const int ia = resolve_setting(*shared_settings, a);
    const int ib = resolve_setting(*shared_settings, b);
    return JointOutcomeDist::point_mass(
        strat.outcomes_a[static_cast<std::size_t>(ia)],
        strat.outcomes_b[static_cast<std::size_t>(ib)]);
  };
  return t;
}

Theory preassigned_pairs_theory() {
  const std::string tag = "preassigned-pairs";
  Theory t;
  t.name = tag;
  t.description = "states are pre-assigned outcome pairs, kernel reads them";
  std::vector<WeightedState> states;
  for (const Outcome oa : kOutcomeOrder) {
    for (const Outcome ob : kOutcomeOrder) {
      states.push_back(
          WeightedState{HiddenState{tag, OutcomePair{oa, ob}}, 0.25});
    }
  }
  t.ensemble = StateEnsemble::finite(tag, std::move(states));
  t.kernel = [tag](const Direction&, const Direction&,
                   const HiddenState& state) {
    const OutcomePair* pair = std::get_if<OutcomePair>(&state.payload);
    if (pair == nullptr || state.space_tag != tag) {
      throw InvalidParameter(
          "preassigned-pairs kernel expects an outcome-pair state");
    }
    return JointOutcomeDist::point_mass(pair->a, pair->b);
  };
  return t;
}

Partition Partition::single_cell() {
  Partition p;
  p.name = "single-cell";
  p.cells.push_back(PartitionCell{"all", [](const HiddenState&) {
    return true;
  }});
  return p;
}

Partition Partition::hemisphere_z() {
  Partition p;
  p.name = "hemisphere-z";
  auto in_north = [](const HiddenState& s) {
    const Direction* d = std::get_if<Direction>(&s.payload);
    if (d == nullptr) {
      throw InvalidParameter(
          "hemisphere-z partition applies to spin-axis state spaces only");
    }
    return d->z() >= 0.0;
  };
  p.cells.push_back(PartitionCell{"north", in_north});
  p.cells.push_back(PartitionCell{
      "south", [in_north](const HiddenState& s) { return !in_north(s); }});
  return p;
}

Theory coarse_grain(const Theory& source, const Partition& partition) {
  if (partition.cells.empty()) {
    throw InvalidParameter("partition has no cells");
  }
  if (source.setting_dependent_ensemble) {
    throw InvalidParameter(
        "cannot coarse-grain a setting-dependent ensemble; inject after "
        "coarse-graining instead");
  }
  const std::string tag = source.ensemble.space_tag() + "/" + partition.name;
  Theory t;
  t.name = source.name + "+coarse-grain:" + partition.name;
  t.description = "coarse-graining of " + source.name + " by " +
                  partition.name;
  t.declared_settings = source.declared_settings;

  if (!source.ensemble.is_finite()) {
    // Sampled cell averages would be approximate and violate the promise
    // that coarse-graining preserves ensemble predictions; only the exact
    // closed-form route is allowed for sampler ensembles.
    if (partition.cells.size() != 1 || !source.ensemble_kernel) {
      throw InvalidParameter(
          "coarse-graining a sampler ensemble needs the single-cell "
          "partition and a closed-form ensemble kernel");
    }
    auto closed_form = source.ensemble_kernel;
    t.ensemble = StateEnsemble::finite(
        tag, {WeightedState{HiddenState{tag, std::int64_t{0}}, 1.0}});
    t.kernel = [closed_form, tag](const Direction& a, const Direction& b,
                                  const HiddenState& state) {
      if (state.space_tag != tag) {
        throw InvalidParameter("state from a different coarse-graining");
      }
      return closed_form(a, b);
    };
    t.ensemble_kernel = closed_form;
    return t;
  }

  const auto& states = source.ensemble.states();
  const std::size_t n_cells = partition.cells.size();
  auto members = std::make_shared<std::vector<std::vector<WeightedState>>>(
      n_cells);
  std::vector<double> cell_weight(n_cells, 0.0);
  for (const auto& ws : states) {
    int home = -1;
    for (std::size_t c = 0; c < n_cells; ++c) {
      if (partition.cells[c].contains(ws.state)) {
        if (home >= 0) {
          throw InvalidParameter("partition cells overlap on state space " +
                                 source.ensemble.space_tag());
        }
        home = static_cast<int>(c);
      }
    }
    if (home < 0) {
      throw InvalidParameter("partition does not cover state space " +
                             source.ensemble.space_tag());
    }
    (*members)[static_cast<std::size_t>(home)].push_back(ws);
    cell_weight[static_cast<std::size_t>(home)] += ws.weight;
  }
  std::vector<WeightedState> cells;
  for (std::size_t c = 0; c < n_cells; ++c) {
    if ((*members)[c].empty()) {
      throw EmptyCell("partition cell '" + partition.cells[c].name +
                      "' has zero weight");
    }
    cells.push_back(WeightedState{
        HiddenState{tag, static_cast<std::int64_t>(c)}, cell_weight[c]});
  }
  auto source_kernel = source.kernel;
  t.ensemble = StateEnsemble::finite(tag, std::move(cells));
  t.kernel = [members, source_kernel, tag](const Direction& a,
                                           const Direction& b,
                                           const HiddenState& state) {
    const std::int64_t* cell = std::get_if<std::int64_t>(&state.payload);
    if (cell == nullptr || state.space_tag != tag || *cell < 0 ||
        *cell >= static_cast<std::int64_t>(members->size())) {
      throw InvalidParameter("state is not a cell of this coarse-graining");
    }
    const auto& cell_states = (*members)[static_cast<std::size_t>(*cell)];
    Theory probe;  // only the kernel matters for the average
    probe.kernel = source_kernel;
    return ensemble_average(probe, a, b, cell_states);
  };
  return t;
}

Theory inject_setting_dependence(const Theory& source, SettingDependentLaw law,
                                 const std::string& law_name) {
  if (!law) {
    throw InvalidParameter("injection needs a law");
  }
  Theory t = source;
  t.name = source.name + "+inject:" + law_name;
  t.description = source.description + ", with setting-dependent states (" +
                  law_name + ")";
  t.setting_dependent_ensemble = std::move(law);
  // Any closed-form average of the base ensemble no longer describes the
  // theory's predictions.
  t.ensemble_kernel = nullptr;
  return t;
}

SettingDependentLaw singlet_superdet_law() {
  const std::string tag = "preassigned-pairs";
  return [tag](const Direction& a, const Direction& b) {
    const JointOutcomeDist joint = singlet_table(a, b);
    std::vector<WeightedState> states;
    for (const Outcome oa : kOutcomeOrder) {
      for (const Outcome ob : kOutcomeOrder) {
        states.push_back(WeightedState{HiddenState{tag, OutcomePair{oa, ob}},
                                       joint.p(oa, ob)});
      }
    }
    return StateEnsemble::finite(tag, std::move(states));
  };
}

SettingDependentLaw constant_law(const Theory& source) {
  StateEnsemble ensemble = source.ensemble;
  return [ensemble](const Direction&, const Direction&) { return ensemble; };
}

Theory make_theory(const std::string& name, const TheoryOptions& options) {
  if (name == "qm-singlet") {
    return qm_singlet_theory();
  }
  if (name == "classical-antiparallel") {
    return classical_antiparallel_theory(
        options.quadrature_nodes > 0
            ? ClassicalMode::quadrature(options.quadrature_nodes)
            : ClassicalMode::sampler(options.seed));
  }
  if (name == "maudlin-tachyon") {
    return maudlin_tachyon_theory();
  }
  if (name == "einstein-boxes") {
    return einstein_boxes_theory(options.n_counters);
  }
  if (name == "lhv-deterministic") {
    if (options.lhv_settings.empty() || options.lhv_strategies.empty()) {
      throw InvalidParameter(
          "lhv-deterministic needs declared settings and strategies");
    }
    return deterministic_lhv_theory(options.lhv_settings,
                                    options.lhv_strategies);
  }
  if (name == "preassigned-pairs") {
    return preassigned_pairs_theory();
  }
  throw InvalidParameter("unknown theory: " + name);
}

std::vector<std::pair<std::string, std::string>> list_theories() {
  return {
      {"qm-singlet", "quantum singlet predictions"},
      {"classical-antiparallel",
       "anti-parallel spins with deterministic sign readout"},
      {"maudlin-tachyon", "coin on wing B plus signaled conditional on A"},
      {"einstein-boxes",
       "one particle over n boxes, counters on the first two"},
      {"lhv-deterministic",
       "mixture of deterministic strategies (requires a strategy table)"},
      {"preassigned-pairs", "point-mass kernel over pre-assigned outcomes"},
  };
}

Partition make_partition(const std::string& name) {
  if (name == "single-cell") {
    return Partition::single_cell();
  }
  if (name == "hemisphere-z") {
    return Partition::hemisphere_z();
  }
  throw InvalidParameter("unknown partition: " + name);
}

SettingDependentLaw make_law(const std::string& name, const Theory& source) {
  if (name == "singlet-superdet") {
    if (source.ensemble.space_tag() != "preassigned-pairs") {
      throw InvalidParameter(
          "singlet-superdet law applies to preassigned-pairs sources");
    }
    return singlet_superdet_law();
  }
  if (name == "constant") {
    return constant_law(source);
  }
  throw InvalidParameter("unknown law: " + name);
}

Theory apply_transform(const Theory& source, const std::string& transform) {
  const auto colon = transform.find(':');
  if (colon == std::string::npos || colon == 0 ||
      colon + 1 >= transform.size()) {
    throw InvalidParameter("transform must look like kind:argument, got '" +
                           transform + "'");
  }
  const std::string kind = transform.substr(0, colon);
  const std::string arg = transform.substr(colon + 1);
  if (kind == "coarse-grain") {
    return coarse_grain(source, make_partition(arg));
  }
  if (kind == "inject") {
    return inject_setting_dependence(source, make_law(arg, source), arg);
  }
  throw InvalidParameter("unknown transform kind: " + kind);
}

}  // namespace belllab
