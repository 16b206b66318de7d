#include "belllab/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <thread>
#include <vector>

#include "belllab/errors.hpp"
#include "belllab/inequality.hpp"
#include "belllab/rng.hpp"
#include "belllab/tolerances.hpp"

namespace belllab {

namespace {

TrialRecord simulate_one(const Theory& t,
                         const std::vector<Direction>& settings_a,
                         const std::vector<Direction>& settings_b,
                         std::uint64_t seed, std::int64_t trial) {
  const auto ti = static_cast<std::uint64_t>(trial);
  RngStream rng_a(seed, streams::kSettingA, ti);
  RngStream rng_b(seed, streams::kSettingB, ti);
  RngStream rng_state(seed, streams::kState, ti);
  RngStream rng_outcome(seed, streams::kOutcome, ti);

  const int ia = static_cast<int>(
      rng_a.next_below(static_cast<std::uint32_t>(settings_a.size())));
  const int ib = static_cast<int>(
      rng_b.next_below(static_cast<std::uint32_t>(settings_b.size())));
  const Direction& a = settings_a[static_cast<std::size_t>(ia)];
  const Direction& b = settings_b[static_cast<std::size_t>(ib)];

  const StateEnsemble& source =
      t.setting_dependent_ensemble ? t.setting_dependent_ensemble(a, b)
                                   : t.ensemble;
  const HiddenState state = source.draw(rng_state);

  const JointOutcomeDist k = t.kernel(a, b, state);
  const double u = rng_outcome.next_double();
  double cumulative = 0.0;
  Outcome oa = Outcome::minus();
  Outcome ob = Outcome::minus();
  bool assigned = false;
  for (const Outcome ca : kOutcomeOrder) {
    for (const Outcome cb : kOutcomeOrder) {
      cumulative += k.p(ca, cb);
      if (u < cumulative) {
        oa = ca;
        ob = cb;
        assigned = true;
        break;
      }
    }
    if (assigned) {
      break;
    }
  }
  // !assigned means u landed in the rounding gap below 1; (-,-) applies.
  return TrialRecord{trial, ia, ib, oa, ob};
}

}  // namespace

TrialLog run_trials(const Theory& t, std::vector<Direction> settings_a,
                    std::vector<Direction> settings_b, std::int64_t n,
                    std::uint64_t seed, int workers) {
  if (settings_a.empty() || settings_b.empty()) {
    throw InvalidParameter("run_trials needs settings on both wings");
  }
  if (n < 0) {
    throw InvalidParameter("run_trials needs a nonnegative trial count");
  }
  if (workers < 1) {
    throw InvalidParameter("run_trials needs at least one worker");
  }
  TrialLog log;
  log.theory_name = t.name;
  log.seed = seed;
  log.settings_a = std::move(settings_a);
  log.settings_b = std::move(settings_b);
  log.records.resize(static_cast<std::size_t>(n));
  // Every trial's draws are keyed by (seed, stream, trial index), so the
  // split into worker ranges cannot affect the content.
  const std::int64_t chunk = (n + workers - 1) / workers;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(n, begin + chunk);
    if (begin >= end) {
      break;
    }
    pool.emplace_back([&, begin, end] {
      for (std::int64_t i = begin; i < end; ++i) {
        log.records[static_cast<std::size_t>(i)] =
            simulate_one(t, log.settings_a, log.settings_b, seed, i);
      }
    });
  }
  for (auto& th : pool) {
    th.join();
  }
  return log;
}

EmpiricalCorrelation empirical_correlation(const TrialLog& log, int a_index,
                                           int b_index) {
  std::int64_t count = 0;
  double sum = 0.0;
  for (const auto& rec : log.records) {
    if (rec.a_index == a_index && rec.b_index == b_index) {
      ++count;
      sum += rec.outcome_a.value() * rec.outcome_b.value();
    }
  }
  if (count == 0) {
    throw NoMatchingTrials("no trials at setting pair (" +
                           std::to_string(a_index) + ", " +
                           std::to_string(b_index) + ")");
  }
  const double mean = sum / static_cast<double>(count);
  EmpiricalCorrelation e;
  e.estimate = mean;
  e.count = count;
  if (count > 1) {
    // Products are +-1, so the sample variance has closed form.
    const double var = (1.0 - mean * mean) * static_cast<double>(count) /
                       static_cast<double>(count - 1);
    e.std_error = std::sqrt(std::max(0.0, var) / static_cast<double>(count));
  }
  return e;
}

namespace {

struct PairCounts {
  std::int64_t n = 0;
  std::int64_t plus_a = 0;
  std::int64_t plus_b = 0;
  double product_sum = 0.0;
};

// Two-proportion z statistic with a pooled standard error. A zero pooled
// error forces both proportions to the same boundary value, hence z = 0.
double proportion_z(std::int64_t k1, std::int64_t n1, std::int64_t k2,
                    std::int64_t n2) {
  const double p1 = static_cast<double>(k1) / static_cast<double>(n1);
  const double p2 = static_cast<double>(k2) / static_cast<double>(n2);
  const double pooled = static_cast<double>(k1 + k2) /
                        static_cast<double>(n1 + n2);
  const double se = std::sqrt(pooled * (1.0 - pooled) *
                              (1.0 / static_cast<double>(n1) +
                               1.0 / static_cast<double>(n2)));
  if (se == 0.0) {
    return 0.0;
  }
  return std::fabs(p1 - p2) / se;
}

}  // namespace

std::vector<ConditionReport> empirical_audit(const TrialLog& log,
                                             const Theory& t,
                                             double tol_sigma) {
  if (tol_sigma <= 0.0) {
    throw InvalidParameter("tol_sigma must be positive");
  }
  const std::size_t na = log.settings_a.size();
  const std::size_t nb = log.settings_b.size();
  std::vector<PairCounts> counts(na * nb);
  for (const auto& rec : log.records) {
    auto& c = counts[static_cast<std::size_t>(rec.a_index) * nb +
                     static_cast<std::size_t>(rec.b_index)];
    ++c.n;
    c.plus_a += rec.outcome_a == Outcome::plus() ? 1 : 0;
    c.plus_b += rec.outcome_b == Outcome::plus() ? 1 : 0;
    c.product_sum += rec.outcome_a.value() * rec.outcome_b.value();
  }
  auto at = [&](std::size_t i, std::size_t j) -> const PairCounts& {
    return counts[i * nb + j];
  };

  ConditionReport signaling;
  signaling.condition = "empirical_no_signaling";
  signaling.tolerance = tol_sigma;
  double worst = 0.0;
  std::optional<Witness> worst_witness;
  std::int64_t evaluated = 0;
  std::int64_t skipped = 0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j1 = 0; j1 < nb; ++j1) {
      for (std::size_t j2 = j1 + 1; j2 < nb; ++j2) {
        if (at(i, j1).n == 0 || at(i, j2).n == 0) {
          ++skipped;
          continue;
        }
        ++evaluated;
        const double z = proportion_z(at(i, j1).plus_a, at(i, j1).n,
                                      at(i, j2).plus_a, at(i, j2).n);
        if (!worst_witness.has_value() || z > worst) {
          worst = std::max(worst, z);
          Witness w;
          w.side = "A";
          w.component = "marginal-spread";
          w.a = log.settings_a[i];
          w.b = log.settings_b[j1];
          w.b_ref = log.settings_b[j2];
          w.outcome_a = Outcome::plus();
          worst_witness = w;
        }
      }
    }
  }
  for (std::size_t j = 0; j < nb; ++j) {
    for (std::size_t i1 = 0; i1 < na; ++i1) {
      for (std::size_t i2 = i1 + 1; i2 < na; ++i2) {
        if (at(i1, j).n == 0 || at(i2, j).n == 0) {
          ++skipped;
          continue;
        }
        ++evaluated;
        const double z = proportion_z(at(i1, j).plus_b, at(i1, j).n,
                                      at(i2, j).plus_b, at(i2, j).n);
        if (z > worst) {
          worst = z;
          Witness w;
          w.side = "B";
          w.component = "marginal-spread";
          w.a = log.settings_a[i1];
          w.a_ref = log.settings_a[i2];
          w.b = log.settings_b[j];
          w.outcome_b = Outcome::plus();
          worst_witness = w;
        }
      }
    }
  }
  signaling.max_deviation = worst;
  signaling.pass = evaluated > 0 && worst <= tol_sigma;
  signaling.witness = worst_witness;
  signaling.evaluated_points = evaluated;
  signaling.skipped_points = skipped;
  if (evaluated == 0) {
    signaling.pass = false;
    signaling.note = "no setting-pair subgroup had trials on both sides";
  }

  ConditionReport agreement;
  agreement.condition = "empirical_correlation_agreement";
  agreement.tolerance = tol_sigma;
  double worst_z = 0.0;
  std::optional<Witness> agree_witness;
  std::int64_t agree_evaluated = 0;
  std::int64_t agree_skipped = 0;
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) {
      if (at(i, j).n == 0) {
        ++agree_skipped;
        continue;
      }
      ++agree_evaluated;
      const EmpiricalCorrelation emp =
          empirical_correlation(log, static_cast<int>(i), static_cast<int>(j));
      const double analytic =
          correlation(t, log.settings_a[i], log.settings_b[j]).value;
      // Score test against the analytic correlation: the null fixes the
      // product-proportion p0 and with it the variance, so small or
      // outcome-degenerate samples never divide by zero. A boundary null
      // (analytic +-1) admits exactly one sample value; anything else is
      // impossible under the theory and reports DBL_MAX.
      const double p0 = std::clamp((1.0 + analytic) / 2.0, 0.0, 1.0);
      const double p_hat = (1.0 + emp.estimate) / 2.0;
      double z = 0.0;
      if (p0 <= 0.0 || p0 >= 1.0) {
        if (std::fabs(p_hat - p0) > kExactTol) {
          z = std::numeric_limits<double>::max();
        }
      } else {
        z = std::fabs(p_hat - p0) /
            std::sqrt(p0 * (1.0 - p0) / static_cast<double>(emp.count));
      }
      if (!agree_witness.has_value() || z > worst_z) {
        worst_z = std::max(worst_z, z);
        Witness w;
        w.side = "AB";
        w.component = "correlation";
        w.a = log.settings_a[i];
        w.b = log.settings_b[j];
        agree_witness = w;
      }
    }
  }
  agreement.max_deviation = worst_z;
  agreement.pass = agree_evaluated > 0 && worst_z <= tol_sigma;
  agreement.witness = agree_witness;
  agreement.evaluated_points = agree_evaluated;
  agreement.skipped_points = agree_skipped;
  if (agree_evaluated == 0) {
    agreement.pass = false;
    agreement.note = "no setting-pair subgroup had trials";
  }

  return {signaling, agreement};
}

void write_csv(const TrialLog& log, std::ostream& out) {
  out << "trial,a_index,b_index,A,B\n";
  for (const auto& rec : log.records) {
    out << rec.trial << ',' << rec.a_index << ',' << rec.b_index << ','
        << (rec.outcome_a == Outcome::plus() ? "+1" : "-1") << ','
        << (rec.outcome_b == Outcome::plus() ? "+1" : "-1") << '\n';
  }
}

std::string to_csv(const TrialLog& log) {
  std::ostringstream out;
  write_csv(log, out);
  return out.str();
}

}  // namespace belllab
