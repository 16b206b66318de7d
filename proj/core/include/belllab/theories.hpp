#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "belllab/theory.hpp"

namespace belllab {

// --- Built-in theories ---------------------------------------------------

// Quantum singlet predictions: single featureless state, joint table
// P(A,B|a,b) = (1 - A*B*(a.b)) / 4.
Theory qm_singlet_theory();

// How the classical anti-parallel model represents its state space.
struct ClassicalMode {
  enum class Kind { kSampler, kQuadrature };

  // Seeded sampler over the uniform sphere. The theory also carries the
  // closed-form ensemble kernel (spherical lune measures), so ensemble
  // predictions stay exact.
  static ClassicalMode sampler(std::uint64_t seed = 1729);

  // Finite node set: `n_polar` Gauss-Legendre nodes in cos(polar angle)
  // crossed with 2*n_polar midpoint azimuth nodes. Even n_polar >= 2 keeps
  // the node set antipodally symmetric.
  static ClassicalMode quadrature(int n_polar);

  Kind kind = Kind::kSampler;
  std::uint64_t seed = 1729;
  int n_polar = 32;
};

// Classical spin model: the pair carries anti-parallel spin vectors along
// a shared axis s drawn uniformly from the sphere; each wing deterministically
// reports the sign of (setting . spin), with sign(0) defined as +1.
Theory classical_antiparallel_theory(ClassicalMode mode = ClassicalMode::sampler());

// Exact ensemble-level joint of the classical anti-parallel model: lune
// measures p(+,+) = p(-,-) = theta/2pi, p(+,-) = p(-,+) = 1/2 - theta/2pi
// where theta is the angle between the settings.
JointOutcomeDist classical_antiparallel_joint(const Direction& a,
                                              const Direction& b);

// Two-wing version of a frame-dependent signaling story: wing B flips a
// fair coin, then wing A's outcome is distributed as
// P(A|B,a,b) = (1 - A*B*(a.b)) / 2. The joint equals the singlet table.
Theory maudlin_tachyon_theory();

// One particle in n boxes, detectors on the first two: exactly one counter
// registers, each with probability 1/n, independent of anything else.
// Requires n >= 2.
Theory einstein_boxes_theory(int n_counters = 4);

// One deterministic response strategy: outcome per declared setting on
// each wing, mixed with the given weight.
struct LhvStrategy {
  std::vector<Outcome> outcomes_a;
  std::vector<Outcome> outcomes_b;
  double weight = 1.0;
};

// Mixture of deterministic local response strategies over a finite
// declared setting set (shared by both wings). Weights must sum to 1
// within 1e-12; each strategy must cover every declared setting.
Theory deterministic_lhv_theory(std::vector<Direction> settings,
                                std::vector<LhvStrategy> strategies);

// States are pre-assigned outcome pairs; the kernel is a point mass on
// the assigned pair. Base ensemble is uniform over the four pairs. This
// is the source theory that setting-dependence injection turns into a
// conspiratorial model.
Theory preassigned_pairs_theory();

// --- Transformations -----------------------------------------------------

// Partition of a state space into named cells. Cells must be mutually
// exclusive and exhaustive over the ensemble's support.
struct PartitionCell {
  std::string name;
  std::function<bool(const HiddenState&)> contains;
};

struct Partition {
  std::string name;
  std::vector<PartitionCell> cells;

  // The trivial partition: one cell holding everything.
  static Partition single_cell();

  // Splits Direction-payload states by the sign of their z component.
  static Partition hemisphere_z();
};

// Replace the state space by the partition cells; the new kernel at a cell
// is the weight-average of the source kernel over the cell, so ensemble
// predictions are preserved. Supported for finite sources (exact cell
// averages) and for sampler sources only with the single-cell partition of
// a theory carrying a closed-form ensemble kernel; other sampler cases
// would make the averages approximate and are rejected. Throws EmptyCell
// for zero-weight cells and InvalidParameter when the cells do not
// partition the support or the source is setting-dependent.
Theory coarse_grain(const Theory& source, const Partition& partition);

using SettingDependentLaw =
    std::function<StateEnsemble(const Direction& a, const Direction& b)>;

// Return a copy of `source` whose state distribution at settings (a, b) is
// law(a, b). Ensemble-level predictions then use the injected law.
Theory inject_setting_dependence(const Theory& source, SettingDependentLaw law,
                                 const std::string& law_name);

// Law over pre-assigned outcome pairs weighted by the singlet joint at the
// actual settings. Injected into preassigned_pairs_theory it reproduces
// the singlet correlations with a pointwise factorizable kernel.
SettingDependentLaw singlet_superdet_law();

// No-op law: every setting pair gets the source's own ensemble.
SettingDependentLaw constant_law(const Theory& source);

// --- Registry -------------------------------------------------------------

struct TheoryOptions {
  std::uint64_t seed = 1729;
  // 0 = sampler mode for the classical model; > 0 selects quadrature mode
  // with that many polar nodes.
  int quadrature_nodes = 0;
  int n_counters = 4;
  // Required for "lhv-deterministic".
  std::vector<Direction> lhv_settings;
  std::vector<LhvStrategy> lhv_strategies;
};

// Construct a built-in theory by registry name: qm-singlet,
// classical-antiparallel, maudlin-tachyon, einstein-boxes,
// lhv-deterministic, preassigned-pairs.
Theory make_theory(const std::string& name, const TheoryOptions& options = {});

// Registry names with one-line descriptions, in stable order.
std::vector<std::pair<std::string, std::string>> list_theories();

// Named partitions: "single-cell", "hemisphere-z".
Partition make_partition(const std::string& name);

// Named laws: "singlet-superdet" (preassigned-pairs sources only),
// "constant".
SettingDependentLaw make_law(const std::string& name, const Theory& source);

// Apply one transform given as "kind:argument", e.g.
// "coarse-grain:single-cell" or "inject:singlet-superdet".
Theory apply_transform(const Theory& source, const std::string& transform);

}  // namespace belllab
