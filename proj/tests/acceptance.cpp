// Acceptance gate: one pass/fail line per criterion, nonzero exit if any
// fails. Each criterion owns a wall-clock budget; exceeding it fails the
// criterion even when the assertions hold.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "belllab/conditions.hpp"
#include "belllab/inequality.hpp"
#include "belllab/montecarlo.hpp"
#include "belllab/rng.hpp"
#include "belllab/theories.hpp"

#include "test_support.hpp"

using namespace belllab;
using Json = nlohmann::json;
using Problems = std::vector<std::string>;

namespace {

constexpr double kTwoSqrtTwo = 2.0 * 1.4142135623730951;

int g_failures = 0;

void criterion(int number, const std::string& description,
               double budget_seconds,
               const std::function<void(Problems&)>& body) {
  Problems problems;
  const auto start = std::chrono::steady_clock::now();
  try {
    body(problems);
  } catch (const std::exception& e) {
    problems.push_back(std::string("threw: ") + e.what());
  }
  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();
  if (budget_seconds > 0.0 && elapsed >= budget_seconds) {
    std::ostringstream msg;
    msg << "exceeded the " << budget_seconds << " s budget";
    problems.push_back(msg.str());
  }
  const bool pass = problems.empty();
  if (!pass) {
    ++g_failures;
  }
  std::printf("[%s] criterion %d: %s (%.0f ms)\n", pass ? "PASS" : "FAIL",
              number, description.c_str(), elapsed * 1000.0);
  for (const std::string& p : problems) {
    std::printf("       - %s\n", p.c_str());
  }
  std::fflush(stdout);
}

void expect(Problems& problems, bool ok, const std::string& what) {
  if (!ok) {
    problems.push_back(what);
  }
}

std::string fmt(double x) {
  std::ostringstream out;
  out.precision(17);
  out << x;
  return out.str();
}

Theory lhv_example() {
  TheoryOptions options;
  options.lhv_settings = {Direction::from_plane_angle(0.0),
                          Direction::from_plane_angle(testsupport::kPi / 4.0),
                          Direction::from_plane_angle(testsupport::kPi / 2.0),
                          Direction::from_plane_angle(3.0 * testsupport::kPi /
                                                      4.0)};
  options.lhv_strategies = {
      {{Outcome::plus(), Outcome::plus(), Outcome::minus(), Outcome::plus()},
       {Outcome::minus(), Outcome::plus(), Outcome::plus(), Outcome::plus()},
       0.5},
      {{Outcome::plus(), Outcome::minus(), Outcome::minus(), Outcome::plus()},
       {Outcome::plus(), Outcome::plus(), Outcome::minus(), Outcome::minus()},
       0.5}};
  return make_theory("lhv-deterministic", options);
}

std::vector<Theory> builtin_theories() {
  std::vector<Theory> out;
  out.push_back(make_theory("qm-singlet"));
  out.push_back(make_theory("classical-antiparallel"));
  out.push_back(make_theory("maudlin-tachyon"));
  out.push_back(make_theory("einstein-boxes"));
  out.push_back(lhv_example());
  out.push_back(make_theory("preassigned-pairs"));
  return out;
}

std::vector<Direction> trial_settings(const Theory& t) {
  if (!t.declared_settings.empty()) {
    return t.declared_settings;
  }
  return {Direction::from_plane_angle(0.0),
          Direction::from_plane_angle(testsupport::kPi / 4.0),
          Direction::from_plane_angle(testsupport::kPi / 2.0),
          Direction::from_plane_angle(3.0 * testsupport::kPi / 4.0)};
}

}  // namespace

int main() {
  criterion(
      1, "single-cell coarse graining reports P(A=+1) = 1/2", 1.0,
      [](Problems& problems) {
        const Theory t = coarse_grain(classical_antiparallel_theory(),
                                      Partition::single_cell());
        const HiddenState cell = t.ensemble.states().at(0).state;
        for (int i = 0; i < 20; ++i) {
          RngStream stream(7, 55, static_cast<std::uint64_t>(i));
          const Direction a = sample_unit_direction(stream);
          const Direction b = sample_unit_direction(stream);
          const double p = t.kernel(a, b, cell).marginal_a().p_plus;
          expect(problems, std::fabs(p - 0.5) <= 1e-12,
                 "P(A=+1) = " + fmt(p) + " at pair " + std::to_string(i));
        }
      });

  criterion(
      2, "conditioning on B at equal settings exposes the lost half", 1.0,
      [](Problems& problems) {
        const Theory t = coarse_grain(classical_antiparallel_theory(),
                                      Partition::single_cell());
        const HiddenState cell = t.ensemble.states().at(0).state;
        for (int i = 0; i < 20; ++i) {
          RngStream stream(7, 56, static_cast<std::uint64_t>(i));
          const Direction a = sample_unit_direction(stream);
          const double p =
              t.kernel(a, a, cell).conditional_a_given_b(Outcome::plus())
                  .p_plus;
          expect(problems, p == 0.0,
                 "P(A=+1|B=+1) = " + fmt(p) + " at pair " + std::to_string(i));
        }
        const ConditionReport oi =
            check_outcome_independence(t, AuditGrid::make_default(t));
        expect(problems, !oi.pass, "outcome independence unexpectedly passed");
        expect(problems, std::fabs(oi.max_deviation - 0.5) <= 1e-9,
               "max deviation " + fmt(oi.max_deviation) + ", wanted 1/2");
        expect(problems, oi.witness.has_value(), "no witness reported");
        if (oi.witness.has_value()) {
          expect(problems,
                 angle_between(oi.witness->a, oi.witness->b) <= 1e-9,
                 "witness settings are not equal");
        }
      });

  criterion(
      3, "the complete description is local; its coarse graining is not", 5.0,
      [](Problems& problems) {
        const Theory fine = classical_antiparallel_theory();
        const AuditGrid grid = AuditGrid::make_default(fine);
        expect(problems, grid.states.size() == 512,
               "expected 512 sampled states, got " +
                   std::to_string(grid.states.size()));
        const ConditionReport oi = check_outcome_independence(fine, grid);
        const ConditionReport sl = check_strong_locality(fine, grid);
        expect(problems, oi.pass && oi.max_deviation <= 1e-12,
               "fine-grained outcome independence deviation " +
                   fmt(oi.max_deviation));
        expect(problems, sl.pass && sl.max_deviation <= 1e-12,
               "fine-grained strong locality deviation " +
                   fmt(sl.max_deviation));

        const Theory coarse = coarse_grain(fine, Partition::single_cell());
        const AuditGrid coarse_grid = AuditGrid::make_default(coarse);
        expect(problems,
               !check_outcome_independence(coarse, coarse_grid).pass,
               "coarse-grained outcome independence did not fail");
        expect(problems, !check_strong_locality(coarse, coarse_grid).pass,
               "coarse-grained strong locality did not fail");
      });

  criterion(
      4, "tachyon-signal tables match the singlet yet only OI fails", 2.0,
      [](Problems& problems) {
        const Theory maudlin = maudlin_tachyon_theory();
        const Theory singlet = qm_singlet_theory();
        const AuditGrid grid = AuditGrid::make_default(maudlin);
        for (const Direction& a : grid.settings_a) {
          for (const Direction& b : grid.settings_b) {
            const JointOutcomeDist lhs =
                ensemble_average(maudlin, a, b, grid.states);
            const JointOutcomeDist rhs = ensemble_average(
                singlet, a, b, AuditGrid::make_default(singlet).states);
            for (const Outcome oa : kOutcomeOrder) {
              for (const Outcome ob : kOutcomeOrder) {
                expect(problems,
                       std::fabs(lhs.p(oa, ob) - rhs.p(oa, ob)) <= 1e-12,
                       "table mismatch at a setting pair");
              }
            }
          }
        }
        expect(problems, check_parameter_independence(maudlin, grid).pass,
               "parameter independence did not pass");
        expect(problems, check_no_signaling(maudlin, grid).pass,
               "no-signaling did not pass");
        expect(problems, !check_outcome_independence(maudlin, grid).pass,
               "outcome independence did not fail");
      });

  criterion(
      5, "factorizability = PI and OI, and strong locality implies it", 10.0,
      [](Problems& problems) {
        for (const Theory& t : builtin_theories()) {
          const DecompositionReport d =
              verify_decomposition(t, AuditGrid::make_default(t));
          expect(problems, d.equivalence_holds,
                 "equivalence failed for " + t.name);
        }
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
          const Theory t = testsupport::random_kernel_theory(seed, 3);
          const DecompositionReport d =
              verify_decomposition(t, AuditGrid::make_default(t));
          expect(problems, d.equivalence_holds,
                 "equivalence failed for random kernel seed " +
                     std::to_string(seed));
        }
        for (std::uint64_t seed = 1; seed <= 100; ++seed) {
          const Theory t = testsupport::random_local_product_theory(seed, 3);
          const DecompositionReport d =
              verify_decomposition(t, AuditGrid::make_default(t));
          expect(problems,
                 d.equivalence_holds && d.strong_locality.pass &&
                     d.factorizability.pass,
                 "local product kernel seed " + std::to_string(seed) +
                     " did not verify");
        }
      });

  criterion(
      6, "CHSH: singlet at 2*sqrt(2), local models capped at 2", 30.0,
      [](Problems& problems) {
        const ChshResult qm =
            chsh_value(qm_singlet_theory(), ChshSettings::standard());
        expect(problems, std::fabs(std::fabs(qm.s) - kTwoSqrtTwo) <= 1e-9,
               "singlet |S| = " + fmt(std::fabs(qm.s)));
        const double bound = lhv_bound_bruteforce(2, 2);
        expect(problems, bound == 2.0,
               "brute-force bound = " + fmt(bound) + ", wanted exactly 2");
        const ChshSearchResult search =
            chsh_search(classical_antiparallel_theory());
        expect(problems, std::fabs(search.abs_s - 2.0) <= 1e-6,
               "classical search max |S| = " + fmt(search.abs_s));
      });

  criterion(
      7, "the superdeterministic model is factorizable yet beats the bound",
      5.0, [](Problems& problems) {
        const Theory t = apply_transform(preassigned_pairs_theory(),
                                         "inject:singlet-superdet");
        const AuditGrid grid = AuditGrid::make_default(t);
        const ConditionReport fact = check_factorizability(t, grid);
        expect(problems, fact.pass && fact.max_deviation == 0.0,
               "factorizability deviation " + fmt(fact.max_deviation));
        expect(problems, !check_measurement_independence(t, grid).pass,
               "measurement independence did not fail");
        const ChshResult r = chsh_value(t, ChshSettings::standard());
        expect(problems, std::fabs(std::fabs(r.s) - kTwoSqrtTwo) <= 1e-9,
               "|S| = " + fmt(std::fabs(r.s)));
      });

  criterion(
      8, "two-box fable: P(A=+1) = 1/4 but P(A=+1|B=+1) = 0", 1.0,
      [](Problems& problems) {
        const Theory t = einstein_boxes_theory(4);
        const AuditGrid grid = AuditGrid::make_default(t);
        const Direction a = grid.settings_a.front();
        const Direction b = grid.settings_b.back();
        const JointOutcomeDist joint = ensemble_average(t, a, b, grid.states);
        expect(problems, joint.marginal_a().p_plus == 0.25,
               "P(A=+1) = " + fmt(joint.marginal_a().p_plus));
        expect(problems,
               joint.conditional_a_given_b(Outcome::plus()).p_plus == 0.0,
               "P(A=+1|B=+1) = " +
                   fmt(joint.conditional_a_given_b(Outcome::plus()).p_plus));
        expect(problems, !check_outcome_independence(t, grid).pass,
               "outcome independence did not fail");
      });

  criterion(
      9, "simulations agree with the analytic correlations, bit-stably", 60.0,
      [](Problems& problems) {
        const std::vector<std::pair<int, int>> pairs = {
            {0, 0}, {0, 1}, {1, 2}, {2, 3}, {3, 0}};
        for (const Theory& t : builtin_theories()) {
          const std::vector<Direction> settings = trial_settings(t);
          const TrialLog log =
              run_trials(t, settings, settings, 100000, 1729, 1);
          const TrialLog four =
              run_trials(t, settings, settings, 100000, 1729, 4);
          const TrialLog eight =
              run_trials(t, settings, settings, 100000, 1729, 8);
          expect(problems, to_csv(log) == to_csv(four),
                 t.name + ": 4-worker CSV differs");
          expect(problems, to_csv(log) == to_csv(eight),
                 t.name + ": 8-worker CSV differs");
          for (const auto& [i, j] : pairs) {
            const EmpiricalCorrelation emp = empirical_correlation(log, i, j);
            const double analytic =
                correlation(t, settings[static_cast<std::size_t>(i)],
                            settings[static_cast<std::size_t>(j)])
                    .value;
            const std::string where = t.name + " at pair (" +
                                      std::to_string(i) + "," +
                                      std::to_string(j) + ")";
            if (emp.std_error == 0.0) {
              expect(problems, emp.estimate == analytic,
                     where + ": degenerate estimate " + fmt(emp.estimate) +
                         " != " + fmt(analytic));
            } else {
              expect(problems,
                     std::fabs(emp.estimate - analytic) <=
                         3.0 * emp.std_error,
                     where + ": |" + fmt(emp.estimate) + " - " +
                         fmt(analytic) + "| > 3 sigma");
            }
          }
        }
      });

  criterion(
      10, "every audited witness replays through the command line", 0.0,
      [](Problems& problems) {
        expect(problems, !testsupport::cli_binary().empty(),
               "BELLLAB_BIN is not set");
        if (testsupport::cli_binary().empty()) {
          return;
        }
        testsupport::TempDir dir("belllab-acceptance");
        const std::vector<std::string> invocations = {
            "audit --theory qm-singlet",
            "audit --theory classical-antiparallel "
            "--transform coarse-grain:single-cell",
            "audit --theory maudlin-tachyon",
            "audit --theory einstein-boxes",
            "audit --theory preassigned-pairs "
            "--transform inject:singlet-superdet",
        };
        for (std::size_t i = 0; i < invocations.size(); ++i) {
          const std::string report_path =
              (dir.path() / ("audit-" + std::to_string(i) + ".json"))
                  .string();
          const testsupport::CliResult audit =
              testsupport::run_cli(invocations[i] + " --out " + report_path);
          expect(problems, audit.exit_code == 0,
                 invocations[i] + " exited with " +
                     std::to_string(audit.exit_code));
          if (audit.exit_code != 0) {
            continue;
          }
          const Json report = Json::parse(audit.output);
          bool any_failing = false;
          for (const Json& c : report.at("conditions")) {
            if (!c.at("pass").get<bool>()) {
              any_failing = true;
            }
          }
          expect(problems, any_failing,
                 invocations[i] + ": no failing condition to replay");
          const testsupport::CliResult replay = testsupport::run_cli(
              "audit --replay-witness " + report_path);
          expect(problems, replay.exit_code == 0,
                 "replay of " + report_path + " exited with " +
                     std::to_string(replay.exit_code));
          if (replay.exit_code != 0) {
            continue;
          }
          const Json replayed = Json::parse(replay.output);
          expect(problems, replayed.at("all_matched").get<bool>(),
                 invocations[i] + ": replay mismatch beyond 1e-12");
        }
      });

  if (g_failures > 0) {
    std::printf("%d criterion(s) failed\n", g_failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
