#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "belllab/conditions.hpp"
#include "belllab/theory.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

struct TrialRecord {
  std::int64_t trial = 0;
  int a_index = 0;
  int b_index = 0;
  Outcome outcome_a = Outcome::plus();
  Outcome outcome_b = Outcome::plus();
};

struct TrialLog {
  std::string theory_name;
  std::uint64_t seed = 0;
  std::vector<Direction> settings_a;
  std::vector<Direction> settings_b;
  std::vector<TrialRecord> records;
};

// Simulate n trials. Per trial, four independent streams derived from
// (seed, stream id, trial index) drive the wing-A setting choice, the
// wing-B setting choice, the state draw, and the outcome draw, so the log
// is a pure function of (theory, settings, n, seed) regardless of
// `workers`. Requires n >= 0, nonempty setting lists, workers >= 1.
TrialLog run_trials(const Theory& t, std::vector<Direction> settings_a,
                    std::vector<Direction> settings_b, std::int64_t n,
                    std::uint64_t seed, int workers = 1);

struct EmpiricalCorrelation {
  double estimate = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(count)
  std::int64_t count = 0;
};

// Mean of A*B over records at one setting-index pair. Throws
// NoMatchingTrials when no record matches.
EmpiricalCorrelation empirical_correlation(const TrialLog& log, int a_index,
                                           int b_index);

// Statistical audit of a log against its theory: per-wing marginal spreads
// across the other wing's setting (two-proportion z-tests) and agreement
// of empirical correlations with the theory's analytic values (score test
// with the analytic value as the null, so degenerate samples never divide
// by zero; a mismatch against a boundary null of +-1 reports DBL_MAX).
// Deviations are z-scores; the tolerance is tol_sigma. Subgroups with no
// trials are counted as skipped, never passed.
std::vector<ConditionReport> empirical_audit(const TrialLog& log,
                                             const Theory& t,
                                             double tol_sigma = kDefaultSigma);

// CSV with header "trial,a_index,b_index,A,B", one record per line, LF
// line endings, outcomes written as +1 / -1.
void write_csv(const TrialLog& log, std::ostream& out);
std::string to_csv(const TrialLog& log);

}  // namespace belllab
