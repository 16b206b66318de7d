#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "belllab/conditions.hpp"
#include "belllab/errors.hpp"
#include "belllab/theories.hpp"

#include "test_support.hpp"

using namespace belllab;
using testsupport::kPi;

namespace {

AuditGrid default_grid(const Theory& t) { return AuditGrid::make_default(t); }

// Truncate both wings to their first `k` settings (states untouched).
AuditGrid prefix_grid(const AuditGrid& grid, std::size_t k) {
  AuditGrid g = grid;
  g.settings_a.erase(g.settings_a.begin() + static_cast<std::ptrdiff_t>(k),
                     g.settings_a.end());
  g.settings_b.erase(g.settings_b.begin() + static_cast<std::ptrdiff_t>(k),
                     g.settings_b.end());
  return g;
}

void check_witness_replays(const Theory& t, const AuditGrid& grid,
                           const ConditionReport& report) {
  REQUIRE(report.witness.has_value());
  const double replayed =
      replay_witness(t, report.condition, *report.witness, grid);
  CHECK(std::fabs(replayed - report.max_deviation) <= 1e-12);
}

}  // namespace

TEST_CASE("default grid enumerates finite states and samples the rest") {
  const Theory qm = qm_singlet_theory();
  const AuditGrid gq = default_grid(qm);
  CHECK(gq.settings_a.size() == 12);  // 8 coplanar + 4 out of plane
  CHECK(gq.settings_b.size() == 12);
  CHECK(gq.states.size() == 1);

  const Theory classical = classical_antiparallel_theory();
  const AuditGrid gc = default_grid(classical);
  CHECK(gc.states.size() == 512);
  double total = 0.0;
  for (const auto& ws : gc.states) {
    total += ws.weight;
  }
  CHECK(total == doctest::Approx(1.0).epsilon(1e-9));

  // Theories with declared settings audit exactly those.
  TheoryOptions options;
  options.lhv_settings = {Direction::from_plane_angle(0.0),
                          Direction::from_plane_angle(1.0),
                          Direction::from_plane_angle(2.0)};
  options.lhv_strategies = {
      {{Outcome::plus(), Outcome::minus(), Outcome::plus()},
       {Outcome::plus(), Outcome::plus(), Outcome::minus()},
       1.0}};
  const Theory lhv = make_theory("lhv-deterministic", options);
  const AuditGrid gl = default_grid(lhv);
  CHECK(gl.settings_a.size() == 3);
  CHECK(gl.settings_b.size() == 3);

  AuditGrid empty;
  CHECK_THROWS_AS(check_parameter_independence(qm, empty), InvalidParameter);
}

TEST_CASE("singlet audit reproduces the textbook verdicts") {
  const Theory t = qm_singlet_theory();
  const AuditGrid grid = default_grid(t);

  const ConditionReport pi = check_parameter_independence(t, grid);
  CHECK(pi.pass);
  CHECK(pi.max_deviation == 0.0);

  const ConditionReport oi = check_outcome_independence(t, grid);
  CHECK(!oi.pass);
  CHECK(oi.max_deviation == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(oi.witness.has_value());
  // The maximal violation sits at equal settings, conditioning on B = +1.
  CHECK(angle_between(oi.witness->a, oi.witness->b) <= 1e-12);
  CHECK(oi.witness->outcome_b == Outcome::plus());

  const ConditionReport sl = check_strong_locality(t, grid);
  CHECK(!sl.pass);
  CHECK(sl.max_deviation == doctest::Approx(0.5).epsilon(1e-12));

  const ConditionReport fact = check_factorizability(t, grid);
  CHECK(!fact.pass);
  CHECK(fact.max_deviation == doctest::Approx(0.25).epsilon(1e-12));

  CHECK(check_no_signaling(t, grid).pass);
  const ConditionReport mi = check_measurement_independence(t, grid);
  CHECK(mi.pass);
  CHECK(mi.max_deviation == 0.0);
  CHECK(!mi.note.empty());
}

TEST_CASE("complete classical description passes every per-state condition") {
  const Theory t = classical_antiparallel_theory();
  const AuditGrid grid = default_grid(t);

  const ConditionReport oi = check_outcome_independence(t, grid);
  CHECK(oi.pass);
  CHECK(oi.max_deviation == 0.0);
  CHECK(oi.skipped_points > 0);  // deterministic tables skip the impossible arm

  const ConditionReport sl = check_strong_locality(t, grid);
  CHECK(sl.pass);
  CHECK(sl.max_deviation == 0.0);

  CHECK(check_factorizability(t, grid).max_deviation == 0.0);
  CHECK(check_parameter_independence(t, grid).max_deviation == 0.0);
  CHECK(check_no_signaling(t, grid).max_deviation == 0.0);
}

TEST_CASE("single-cell coarse graining destroys completeness") {
  const Theory t = coarse_grain(classical_antiparallel_theory(),
                                Partition::single_cell());
  const AuditGrid grid = default_grid(t);

  const ConditionReport oi = check_outcome_independence(t, grid);
  CHECK(!oi.pass);
  CHECK(std::fabs(oi.max_deviation - 0.5) <= 1e-9);
  REQUIRE(oi.witness.has_value());
  CHECK(angle_between(oi.witness->a, oi.witness->b) <= 1e-12);

  const ConditionReport sl = check_strong_locality(t, grid);
  CHECK(!sl.pass);
  CHECK(std::fabs(sl.max_deviation - 0.5) <= 1e-9);

  // The ensemble-level story is unchanged: still no signaling.
  CHECK(check_no_signaling(t, grid).pass);
}

TEST_CASE("tachyon-signal theory separates signaling from completeness") {
  const Theory t = maudlin_tachyon_theory();
  const AuditGrid grid = default_grid(t);
  CHECK(check_parameter_independence(t, grid).pass);
  CHECK(check_no_signaling(t, grid).pass);
  const ConditionReport oi = check_outcome_independence(t, grid);
  CHECK(!oi.pass);
  CHECK(oi.max_deviation == doctest::Approx(0.5).epsilon(1e-12));
  REQUIRE(oi.witness.has_value());
  CHECK(angle_between(oi.witness->a, oi.witness->b) <= 1e-12);
}

TEST_CASE("boxes theory fails outcome independence only") {
  const Theory t = einstein_boxes_theory(4);
  const AuditGrid grid = default_grid(t);
  CHECK(!check_outcome_independence(t, grid).pass);
  CHECK(check_parameter_independence(t, grid).pass);
  CHECK(check_no_signaling(t, grid).pass);
}

TEST_CASE("setting-dependent marginals fail PI while factorizing pointwise") {
  const Theory t = testsupport::signaling_product_theory();
  const AuditGrid grid = default_grid(t);

  const ConditionReport fact = check_factorizability(t, grid);
  CHECK(fact.pass);
  CHECK(fact.max_deviation <= 1e-15);

  const ConditionReport pi = check_parameter_independence(t, grid);
  CHECK(!pi.pass);
  // The default grid holds antipodal setting pairs, so the marginal
  // spread reaches (1 - (-1))/2 = 1.
  CHECK(pi.max_deviation == doctest::Approx(1.0).epsilon(1e-12));

  CHECK(check_outcome_independence(t, grid).pass);
  CHECK(!check_strong_locality(t, grid).pass);
  CHECK(!check_no_signaling(t, grid).pass);

  // Here the audited biconditional genuinely fails: the theory factorizes
  // without being parameter independent, and the report says so.
  const DecompositionReport d = verify_decomposition(t, grid);
  CHECK(!d.equivalence_holds);
}

TEST_CASE("superdeterministic injection: factorizable but not free") {
  const Theory t = apply_transform(preassigned_pairs_theory(),
                                   "inject:singlet-superdet");
  const AuditGrid grid = default_grid(t);

  const ConditionReport fact = check_factorizability(t, grid);
  CHECK(fact.pass);
  CHECK(fact.max_deviation == 0.0);

  const ConditionReport mi = check_measurement_independence(t, grid);
  CHECK(!mi.pass);
  CHECK(mi.max_deviation > 0.25);
  REQUIRE(mi.witness.has_value());
  check_witness_replays(t, grid, mi);

  CHECK(check_no_signaling(t, grid).pass);

  // Constant injection, by contrast, passes with deviation exactly 0.
  const Theory base = preassigned_pairs_theory();
  const Theory noop = inject_setting_dependence(base, constant_law(base),
                                                "constant");
  const ConditionReport mi2 = check_measurement_independence(noop, grid);
  CHECK(mi2.pass);
  CHECK(mi2.max_deviation == 0.0);
}

TEST_CASE("strong locality folds in marginal spread when PI fails") {
  const Theory t = testsupport::signaling_product_theory();
  const AuditGrid grid = default_grid(t);
  const ConditionReport sl = check_strong_locality(t, grid);
  CHECK(!sl.pass);
  CHECK(sl.max_deviation == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(sl.note.find("parameter independence failed") != std::string::npos);
  REQUIRE(sl.witness.has_value());
  check_witness_replays(t, grid, sl);
}

TEST_CASE("decomposition equivalence holds for the built-ins") {
  std::vector<Theory> theories;
  theories.push_back(qm_singlet_theory());
  theories.push_back(classical_antiparallel_theory());
  theories.push_back(maudlin_tachyon_theory());
  theories.push_back(einstein_boxes_theory(4));
  theories.push_back(preassigned_pairs_theory());
  theories.push_back(coarse_grain(classical_antiparallel_theory(),
                                  Partition::single_cell()));
  theories.push_back(apply_transform(preassigned_pairs_theory(),
                                     "inject:singlet-superdet"));
  for (const Theory& t : theories) {
    CAPTURE(t.name);
    const DecompositionReport d = verify_decomposition(t, default_grid(t));
    CHECK(d.equivalence_holds);
    // Strong locality implies factorizability whenever it holds.
    if (d.strong_locality.pass) {
      CHECK(d.factorizability.pass);
    }
  }
}

TEST_CASE("decomposition sandwich on randomized kernels") {
  // For kernels whose conditioning marginals stay >= 0.1, the
  // factorizability and outcome-independence deviations bound each other:
  //   fact <= oi  and  oi <= 10 * fact   (c = 10, documented).
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Theory t = testsupport::random_kernel_theory(seed, 3);
    const AuditGrid grid = default_grid(t);
    const ConditionReport fact = check_factorizability(t, grid);
    const ConditionReport oi = check_outcome_independence(t, grid);
    CAPTURE(seed);
    CHECK(fact.max_deviation <= oi.max_deviation + 1e-12);
    CHECK(oi.max_deviation <= 10.0 * fact.max_deviation + 1e-12);

    const DecompositionReport d = verify_decomposition(t, grid);
    CHECK(d.equivalence_holds);
  }
  for (std::uint64_t seed = 1; seed <= 40; ++seed) {
    const Theory t = testsupport::random_local_product_theory(seed, 3);
    const AuditGrid grid = default_grid(t);
    CAPTURE(seed);
    CHECK(check_factorizability(t, grid).max_deviation <= 1e-12);
    CHECK(check_outcome_independence(t, grid).max_deviation <= 1e-12);
    CHECK(check_parameter_independence(t, grid).max_deviation <= 1e-12);
    const DecompositionReport d = verify_decomposition(t, grid);
    CHECK(d.equivalence_holds);
    CHECK(d.strong_locality.pass);
  }
}

TEST_CASE("audits are monotone under grid growth") {
  const Theory t = testsupport::random_kernel_theory(11, 3);
  const AuditGrid full = default_grid(t);
  double prev_pi = 0.0;
  double prev_oi = 0.0;
  double prev_fact = 0.0;
  double prev_sl = 0.0;
  double prev_ns = 0.0;
  for (std::size_t k = 2; k <= full.settings_a.size(); ++k) {
    const AuditGrid g = prefix_grid(full, k);
    const double pi = check_parameter_independence(t, g).max_deviation;
    const double oi = check_outcome_independence(t, g).max_deviation;
    const double fact = check_factorizability(t, g).max_deviation;
    const double sl = check_strong_locality(t, g).max_deviation;
    const double ns = check_no_signaling(t, g).max_deviation;
    CAPTURE(k);
    CHECK(pi >= prev_pi);
    CHECK(oi >= prev_oi);
    CHECK(fact >= prev_fact);
    // The reference-marginal protocol can shift by the PI tolerance when
    // the mode switches, hence the slack.
    CHECK(sl >= prev_sl - 1e-9);
    CHECK(ns >= prev_ns);
    prev_pi = pi;
    prev_oi = oi;
    prev_fact = fact;
    prev_sl = sl;
    prev_ns = ns;
  }
}

TEST_CASE("every witness replays to its reported deviation") {
  std::vector<Theory> theories;
  theories.push_back(qm_singlet_theory());
  theories.push_back(maudlin_tachyon_theory());
  theories.push_back(einstein_boxes_theory(4));
  theories.push_back(coarse_grain(classical_antiparallel_theory(),
                                  Partition::single_cell()));
  theories.push_back(testsupport::signaling_product_theory());
  for (std::uint64_t seed = 50; seed < 58; ++seed) {
    theories.push_back(testsupport::random_kernel_theory(seed, 2));
  }
  for (const Theory& t : theories) {
    const AuditGrid grid = default_grid(t);
    const std::vector<ConditionReport> reports = {
        check_strong_locality(t, grid),
        check_factorizability(t, grid),
        check_parameter_independence(t, grid),
        check_outcome_independence(t, grid),
        check_no_signaling(t, grid),
    };
    for (const ConditionReport& r : reports) {
      CAPTURE(t.name);
      CAPTURE(r.condition);
      check_witness_replays(t, grid, r);
    }
  }
}

TEST_CASE("replay rejects unknown conditions") {
  const Theory t = qm_singlet_theory();
  const AuditGrid grid = default_grid(t);
  const ConditionReport oi = check_outcome_independence(t, grid);
  REQUIRE(oi.witness.has_value());
  CHECK_THROWS_AS(replay_witness(t, "no-such-condition", *oi.witness, grid),
                  InvalidParameter);
}
