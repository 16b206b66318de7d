#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "belllab/theory.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

// Settings and states a condition audit ranges over. The first entry of
// each setting list doubles as that wing's reference setting for
// conditions that need a distinguished marginal.
struct AuditGrid {
  std::vector<Direction> settings_a;
  std::vector<Direction> settings_b;
  std::vector<WeightedState> states;
  std::uint64_t seed = 0;

  struct Options {
    std::uint64_t seed = 1729;
    // Coplanar settings per wing, at multiples of 2*pi/coplanar_count.
    int coplanar_count = 8;
    // Fixed out-of-plane settings appended per wing.
    bool out_of_plane = true;
    // States sampled from sampler ensembles.
    int state_samples = 512;
  };

  // Default grid: 8 coplanar settings per wing at multiples of pi/4 plus 4
  // out-of-plane directions; finite ensembles enumerate their states,
  // sampler ensembles contribute `state_samples` seeded draws. Theories
  // with declared settings use those for both wings instead.
  static AuditGrid make_default(const Theory& t, const Options& options);
  static AuditGrid make_default(const Theory& t);
};

// Where a deviation was attained, with enough context to recompute it
// standalone. `component` distinguishes sub-checks within one condition
// (e.g. "conditional" vs "marginal-spread" for strong locality).
struct Witness {
  std::string side;  // "A" or "B"
  std::string component;
  Direction a{0, 0, 1};
  Direction b{0, 0, 1};
  std::optional<Direction> a_ref;
  std::optional<Direction> b_ref;
  std::optional<HiddenState> state;
  std::optional<Outcome> outcome_a;
  std::optional<Outcome> outcome_b;
};

// Result of one condition audit. Invariants: pass == (max_deviation <=
// tolerance); a witness is present whenever at least one point was
// evaluated, and re-evaluating it reproduces max_deviation within 1e-12.
struct ConditionReport {
  std::string condition;
  bool pass = true;
  double max_deviation = 0.0;
  double tolerance = kDefaultAuditTol;
  std::optional<Witness> witness;
  std::int64_t evaluated_points = 0;
  std::int64_t skipped_points = 0;  // zero-probability conditioning events
  std::string note;
};

// Per-state conditions ------------------------------------------------------
//
// All auditors scan the grid in a fixed lexicographic order (state, setting
// A, setting B, conditioning outcome, outcome) and report the earliest
// witness within 1e-12 of the max deviation. Zero-probability conditioning
// events are skipped and counted, never treated as zero deviation. Throws
// DegenerateGrid when nothing at all could be evaluated.

// Wing outcomes depend only on the local setting and the state:
// P(A|a,b,B,state) = P(A|a,state) and mirrored. The reference marginal
// P(A|a,state) is taken at the grid's reference setting of the other wing
// once parameter independence certifies it is setting-free; when parameter
// independence fails, each setting's own marginal is used instead and the
// parameter-independence deviation is folded into the report.
ConditionReport check_strong_locality(const Theory& t, const AuditGrid& grid,
                                      double tol = kDefaultAuditTol);

// The joint at each (a, b, state) is the product of its marginals.
ConditionReport check_factorizability(const Theory& t, const AuditGrid& grid,
                                      double tol = kDefaultAuditTol);

// One wing's marginal is independent of the other wing's setting:
// max spread of P(A|a,b,state) across b, and mirrored.
ConditionReport check_parameter_independence(const Theory& t,
                                             const AuditGrid& grid,
                                             double tol = kDefaultAuditTol);

// One wing's outcome is independent of the other wing's outcome at fixed
// settings and state: |P(A|a,b,B,state) - P(A|a,b,state)|, and mirrored.
ConditionReport check_outcome_independence(const Theory& t,
                                           const AuditGrid& grid,
                                           double tol = kDefaultAuditTol);

// Ensemble-level conditions --------------------------------------------------

// The state-averaged marginal of each wing is independent of the other
// wing's setting.
ConditionReport check_no_signaling(const Theory& t, const AuditGrid& grid,
                                   double tol = kDefaultAuditTol);

// The state distribution is independent of the settings: max total
// variation distance between the ensembles at any two grid setting pairs.
// Theories without a setting-dependent ensemble pass with deviation 0 by
// construction.
ConditionReport check_measurement_independence(const Theory& t,
                                               const AuditGrid& grid,
                                               double tol = kDefaultAuditTol);

// Decomposition of strong locality ------------------------------------------

struct DecompositionReport {
  ConditionReport strong_locality;
  ConditionReport parameter_independence;
  ConditionReport outcome_independence;
  ConditionReport factorizability;
  // True when (factorizability passed) == (parameter independence and
  // outcome independence both passed) and strong locality implies
  // factorizability at the shared tolerance.
  bool equivalence_holds = false;
};

DecompositionReport verify_decomposition(const Theory& t, const AuditGrid& grid,
                                         double tol = kDefaultAuditTol);

// Recompute the deviation a witness claims, from the witness alone (plus
// the grid for ensemble-level conditions). Dispatches on the condition
// name stored in the report.
double replay_witness(const Theory& t, const std::string& condition,
                      const Witness& witness, const AuditGrid& grid);

}  // namespace belllab
