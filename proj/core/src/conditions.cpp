#include "belllab/conditions.hpp"

#include <cmath>
#include <functional>
#include <utility>

#include "belllab/errors.hpp"

namespace belllab {

namespace {

using WitnessBuilder = std::function<Witness()>;
using EmitFn = std::function<void(double, const WitnessBuilder&)>;
using SkipFn = std::function<void()>;
using EnumerateFn = std::function<void(const EmitFn&, const SkipFn&)>;

struct ScanOutcome {
  double max_deviation = 0.0;
  std::int64_t evaluated = 0;
  std::int64_t skipped = 0;
  std::optional<Witness> witness;
};

// Two deterministic passes over a pure enumeration: first the max
// deviation, then the earliest point within kWitnessSlack of it. The
// slack keeps float noise from moving the witness between grid points
// whose deviations are analytically equal.
ScanOutcome scan(const EnumerateFn& enumerate) {
  ScanOutcome out;
  enumerate(
      [&out](double dev, const WitnessBuilder&) {
        ++out.evaluated;
        if (dev > out.max_deviation) {
          out.max_deviation = dev;
        }
      },
      [&out] { ++out.skipped; });
  if (out.evaluated > 0) {
    bool found = false;
    enumerate(
        [&out, &found](double dev, const WitnessBuilder& build) {
          if (!found && dev >= out.max_deviation - kWitnessSlack) {
            out.witness = build();
            found = true;
          }
        },
        [] {});
  }
  return out;
}

ConditionReport finish(std::string condition, double tol, ScanOutcome scanned,
                       std::string note = "") {
  if (scanned.evaluated == 0) {
    throw DegenerateGrid("audit of " + condition +
                         " evaluated no points; every conditioning event on "
                         "the grid had zero probability");
  }
  ConditionReport r;
  r.condition = std::move(condition);
  r.tolerance = tol;
  r.max_deviation = scanned.max_deviation;
  r.pass = scanned.max_deviation <= tol;
  r.witness = std::move(scanned.witness);
  r.evaluated_points = scanned.evaluated;
  r.skipped_points = scanned.skipped;
  r.note = std::move(note);
  return r;
}

void validate_grid(const AuditGrid& grid) {
  if (grid.settings_a.empty() || grid.settings_b.empty()) {
    throw InvalidParameter("audit grid needs settings on both wings");
  }
  if (grid.states.empty()) {
    throw InvalidParameter("audit grid needs at least one state");
  }
}

// Spread of one wing's kernel marginal across the other wing's settings,
// for every (state, own setting, outcome). This is the body of the
// parameter-independence audit and of the fold-in that strong locality
// performs when parameter independence fails.
void enumerate_marginal_spread(const Theory& t, const AuditGrid& grid,
                               const EmitFn& emit) {
  for (const auto& ws : grid.states) {
    for (const Direction& a : grid.settings_a) {
      std::vector<OutcomeDist> marginals;
      marginals.reserve(grid.settings_b.size());
      for (const Direction& b : grid.settings_b) {
        marginals.push_back(t.kernel(a, b, ws.state).marginal_a());
      }
      for (const Outcome oa : kOutcomeOrder) {
        std::size_t hi = 0;
        std::size_t lo = 0;
        for (std::size_t j = 1; j < marginals.size(); ++j) {
          if (marginals[j].p(oa) > marginals[hi].p(oa)) {
            hi = j;
          }
          if (marginals[j].p(oa) < marginals[lo].p(oa)) {
            lo = j;
          }
        }
        const double dev = marginals[hi].p(oa) - marginals[lo].p(oa);
        emit(dev, [&, hi, lo, oa] {
          Witness w;
          w.side = "A";
          w.component = "marginal-spread";
          w.a = a;
          w.b = grid.settings_b[hi];
          w.b_ref = grid.settings_b[lo];
          w.state = ws.state;
          w.outcome_a = oa;
          return w;
        });
      }
    }
    for (const Direction& b : grid.settings_b) {
      std::vector<OutcomeDist> marginals;
      marginals.reserve(grid.settings_a.size());
      for (const Direction& a : grid.settings_a) {
        marginals.push_back(t.kernel(a, b, ws.state).marginal_b());
      }
      for (const Outcome ob : kOutcomeOrder) {
        std::size_t hi = 0;
        std::size_t lo = 0;
        for (std::size_t j = 1; j < marginals.size(); ++j) {
          if (marginals[j].p(ob) > marginals[hi].p(ob)) {
            hi = j;
          }
          if (marginals[j].p(ob) < marginals[lo].p(ob)) {
            lo = j;
          }
        }
        const double dev = marginals[hi].p(ob) - marginals[lo].p(ob);
        emit(dev, [&, hi, lo, ob] {
          Witness w;
          w.side = "B";
          w.component = "marginal-spread";
          w.a = grid.settings_a[hi];
          w.a_ref = grid.settings_a[lo];
          w.b = b;
          w.state = ws.state;
          w.outcome_b = ob;
          return w;
        });
      }
    }
  }
}

// Conditionals against a per-(state, settings) reference marginal.
// `ref_b` maps wing B's setting to the setting whose A-marginal serves as
// the reference (and mirrored for `ref_a`); the identity map makes this
// the outcome-independence deviation, a constant map the strong-locality
// deviation.
void enumerate_conditionals(
    const Theory& t, const AuditGrid& grid,
    const std::function<const Direction&(const Direction&)>& ref_b,
    const std::function<const Direction&(const Direction&)>& ref_a,
    const EmitFn& emit, const SkipFn& skip) {
  for (const auto& ws : grid.states) {
    for (const Direction& a : grid.settings_a) {
      for (const Direction& b : grid.settings_b) {
        const JointOutcomeDist k = t.kernel(a, b, ws.state);
        const OutcomeDist ref_marginal_a =
            t.kernel(a, ref_b(b), ws.state).marginal_a();
        for (const Outcome ob : kOutcomeOrder) {
          if (!(k.marginal_b().p(ob) > 0.0)) {
            skip();
            continue;
          }
          const OutcomeDist cond = k.conditional_a_given_b(ob);
          for (const Outcome oa : kOutcomeOrder) {
            const double dev = std::fabs(cond.p(oa) - ref_marginal_a.p(oa));
            emit(dev, [&, oa, ob] {
              Witness w;
              w.side = "A";
              w.component = "conditional";
              w.a = a;
              w.b = b;
              w.b_ref = ref_b(b);
              w.state = ws.state;
              w.outcome_a = oa;
              w.outcome_b = ob;
              return w;
            });
          }
        }
        const OutcomeDist ref_marginal_b =
            t.kernel(ref_a(a), b, ws.state).marginal_b();
        for (const Outcome oa : kOutcomeOrder) {
          if (!(k.marginal_a().p(oa) > 0.0)) {
            skip();
            continue;
          }
          const OutcomeDist cond = k.conditional_b_given_a(oa);
          for (const Outcome ob : kOutcomeOrder) {
            const double dev = std::fabs(cond.p(ob) - ref_marginal_b.p(ob));
            emit(dev, [&, oa, ob] {
              Witness w;
              w.side = "B";
              w.component = "conditional";
              w.a = a;
              w.a_ref = ref_a(a);
              w.b = b;
              w.state = ws.state;
              w.outcome_a = oa;
              w.outcome_b = ob;
              return w;
            });
          }
        }
      }
    }
  }
}

const Direction& identity_ref(const Direction& d) { return d; }

}  // namespace

AuditGrid AuditGrid::make_default(const Theory& t) {
  return make_default(t, Options{});
}

AuditGrid AuditGrid::make_default(const Theory& t, const Options& options) {
  if (options.coplanar_count < 1 || options.state_samples < 1) {
    throw InvalidParameter("audit grid options must be positive");
  }
  AuditGrid grid;
  grid.seed = options.seed;
  if (!t.declared_settings.empty()) {
    grid.settings_a = t.declared_settings;
    grid.settings_b = t.declared_settings;
  } else {
    for (int k = 0; k < options.coplanar_count; ++k) {
      grid.settings_a.push_back(Direction::from_plane_angle(
          k * 2.0 * 3.14159265358979323846 / options.coplanar_count));
    }
    if (options.out_of_plane) {
      grid.settings_a.push_back(Direction(0.0, 1.0, 0.0));
      grid.settings_a.push_back(Direction(0.0, -1.0, 0.0));
      grid.settings_a.push_back(Direction::normalized(1.0, 1.0, 1.0));
      grid.settings_a.push_back(Direction::normalized(-1.0, 1.0, -1.0));
    }
    grid.settings_b = grid.settings_a;
  }
  if (t.ensemble.is_finite()) {
    grid.states = t.ensemble.states();
  } else {
    const double w = 1.0 / options.state_samples;
    for (int i = 0; i < options.state_samples; ++i) {
      RngStream rng(options.seed, streams::kGridStates,
                    static_cast<std::uint64_t>(i));
      grid.states.push_back(WeightedState{t.ensemble.draw(rng), w});
    }
  }
  return grid;
}

ConditionReport check_parameter_independence(const Theory& t,
                                             const AuditGrid& grid,
                                             double tol) {
  validate_grid(grid);
  ScanOutcome scanned = scan([&](const EmitFn& emit, const SkipFn&) {
    enumerate_marginal_spread(t, grid, emit);
  });
  return finish("parameter_independence", tol, std::move(scanned));
}

ConditionReport check_outcome_independence(const Theory& t,
                                           const AuditGrid& grid, double tol) {
  validate_grid(grid);
  ScanOutcome scanned = scan([&](const EmitFn& emit, const SkipFn& skip) {
    enumerate_conditionals(t, grid, identity_ref, identity_ref, emit, skip);
  });
  return finish("outcome_independence", tol, std::move(scanned));
}

ConditionReport check_strong_locality(const Theory& t, const AuditGrid& grid,
                                      double tol) {
  validate_grid(grid);
  const ScanOutcome pi = scan([&](const EmitFn& emit, const SkipFn&) {
    enumerate_marginal_spread(t, grid, emit);
  });
  const bool pi_holds = pi.max_deviation <= tol;
  std::string note;
  ScanOutcome scanned;
  if (pi_holds) {
    // Parameter independence certifies the kernel marginals are
    // setting-free, so one reference setting per wing audits
    // P(A|a,b,B,state) against P(A|a,state).
    const Direction& fixed_b = grid.settings_b.front();
    const Direction& fixed_a = grid.settings_a.front();
    scanned = scan([&](const EmitFn& emit, const SkipFn& skip) {
      enumerate_conditionals(
          t, grid, [&fixed_b](const Direction&) -> const Direction& {
            return fixed_b;
          },
          [&fixed_a](const Direction&) -> const Direction& { return fixed_a; },
          emit, skip);
    });
    note = "reference marginals taken at the grid's first settings; "
           "parameter independence held";
  } else {
    // No setting-free marginal exists; audit conditionals against each
    // setting's own marginal and fold the marginal spread itself in.
    scanned = scan([&](const EmitFn& emit, const SkipFn& skip) {
      enumerate_conditionals(t, grid, identity_ref, identity_ref, emit, skip);
      enumerate_marginal_spread(t, grid, emit);
    });
    note = "parameter independence failed; conditionals audited against "
           "each setting's own marginal with the marginal spread folded in";
  }
  return finish("strong_locality", tol, std::move(scanned), std::move(note));
}

ConditionReport check_factorizability(const Theory& t, const AuditGrid& grid,
                                      double tol) {
  validate_grid(grid);
  ScanOutcome scanned = scan([&](const EmitFn& emit, const SkipFn&) {
    for (const auto& ws : grid.states) {
      for (const Direction& a : grid.settings_a) {
        for (const Direction& b : grid.settings_b) {
          const JointOutcomeDist k = t.kernel(a, b, ws.state);
          const OutcomeDist ma = k.marginal_a();
          const OutcomeDist mb = k.marginal_b();
          for (const Outcome oa : kOutcomeOrder) {
            for (const Outcome ob : kOutcomeOrder) {
              const double dev =
                  std::fabs(k.p(oa, ob) - ma.p(oa) * mb.p(ob));
              emit(dev, [&, oa, ob] {
                Witness w;
                w.side = "AB";
                w.component = "product";
                w.a = a;
                w.b = b;
                w.state = ws.state;
                w.outcome_a = oa;
                w.outcome_b = ob;
                return w;
              });
            }
          }
        }
      }
    }
  });
  return finish("factorizability", tol, std::move(scanned));
}

ConditionReport check_no_signaling(const Theory& t, const AuditGrid& grid,
                                   double tol) {
  validate_grid(grid);
  const std::size_t na = grid.settings_a.size();
  const std::size_t nb = grid.settings_b.size();
  std::vector<JointOutcomeDist> averaged;
  averaged.reserve(na * nb);
  for (const Direction& a : grid.settings_a) {
    for (const Direction& b : grid.settings_b) {
      averaged.push_back(ensemble_average(t, a, b, grid.states));
    }
  }
  auto at = [&](std::size_t i, std::size_t j) -> const JointOutcomeDist& {
    return averaged[i * nb + j];
  };
  ScanOutcome scanned = scan([&](const EmitFn& emit, const SkipFn&) {
    for (std::size_t i = 0; i < na; ++i) {
      for (const Outcome oa : kOutcomeOrder) {
        std::size_t hi = 0;
        std::size_t lo = 0;
        for (std::size_t j = 1; j < nb; ++j) {
          if (at(i, j).marginal_a().p(oa) > at(i, hi).marginal_a().p(oa)) {
            hi = j;
          }
          if (at(i, j).marginal_a().p(oa) < at(i, lo).marginal_a().p(oa)) {
            lo = j;
          }
        }
        const double dev =
            at(i, hi).marginal_a().p(oa) - at(i, lo).marginal_a().p(oa);
        emit(dev, [&, i, hi, lo, oa] {
          Witness w;
          w.side = "A";
          w.component = "marginal-spread";
          w.a = grid.settings_a[i];
          w.b = grid.settings_b[hi];
          w.b_ref = grid.settings_b[lo];
          w.outcome_a = oa;
          return w;
        });
      }
    }
    for (std::size_t j = 0; j < nb; ++j) {
      for (const Outcome ob : kOutcomeOrder) {
        std::size_t hi = 0;
        std::size_t lo = 0;
        for (std::size_t i = 1; i < na; ++i) {
          if (at(i, j).marginal_b().p(ob) > at(hi, j).marginal_b().p(ob)) {
            hi = i;
          }
          if (at(i, j).marginal_b().p(ob) < at(lo, j).marginal_b().p(ob)) {
            lo = i;
          }
        }
        const double dev =
            at(hi, j).marginal_b().p(ob) - at(lo, j).marginal_b().p(ob);
        emit(dev, [&, j, hi, lo, ob] {
          Witness w;
          w.side = "B";
          w.component = "marginal-spread";
          w.a = grid.settings_a[hi];
          w.a_ref = grid.settings_a[lo];
          w.b = grid.settings_b[j];
          w.outcome_b = ob;
          return w;
        });
      }
    }
  });
  return finish("no_signaling", tol, std::move(scanned));
}

ConditionReport check_measurement_independence(const Theory& t,
                                               const AuditGrid& grid,
                                               double tol) {
  validate_grid(grid);
  if (!t.setting_dependent_ensemble) {
    ConditionReport r;
    r.condition = "measurement_independence";
    r.pass = true;
    r.max_deviation = 0.0;
    r.tolerance = tol;
    r.note = "no setting-dependent ensemble declared; holds by construction";
    return r;
  }
  const std::size_t na = grid.settings_a.size();
  const std::size_t nb = grid.settings_b.size();
  std::vector<StateEnsemble> ensembles;
  ensembles.reserve(na * nb);
  for (const Direction& a : grid.settings_a) {
    for (const Direction& b : grid.settings_b) {
      ensembles.push_back(t.setting_dependent_ensemble(a, b));
    }
  }
  ScanOutcome scanned = scan([&](const EmitFn& emit, const SkipFn&) {
    for (std::size_t p = 0; p < ensembles.size(); ++p) {
      for (std::size_t q = p + 1; q < ensembles.size(); ++q) {
        const double dev = tv_distance(ensembles[p], ensembles[q]);
        emit(dev, [&, p, q] {
          Witness w;
          w.side = "AB";
          w.component = "ensemble-tv";
          w.a = grid.settings_a[p / nb];
          w.b = grid.settings_b[p % nb];
          w.a_ref = grid.settings_a[q / nb];
          w.b_ref = grid.settings_b[q % nb];
          return w;
        });
      }
    }
  });
  return finish("measurement_independence", tol, std::move(scanned));
}

DecompositionReport verify_decomposition(const Theory& t, const AuditGrid& grid,
                                         double tol) {
  DecompositionReport r;
  r.strong_locality = check_strong_locality(t, grid, tol);
  r.parameter_independence = check_parameter_independence(t, grid, tol);
  r.outcome_independence = check_outcome_independence(t, grid, tol);
  r.factorizability = check_factorizability(t, grid, tol);
  const bool joint_pass =
      r.parameter_independence.pass && r.outcome_independence.pass;
  r.equivalence_holds = (r.factorizability.pass == joint_pass) &&
                        (!r.strong_locality.pass || r.factorizability.pass);
  return r;
}

double replay_witness(const Theory& t, const std::string& condition,
                      const Witness& w, const AuditGrid& grid) {
  auto require = [](bool ok, const std::string& what) {
    if (!ok) {
      throw InvalidParameter("witness is missing " + what);
    }
  };
  auto kernel_at = [&t](const Direction& a, const Direction& b,
                        const std::optional<HiddenState>& s) {
    if (!s.has_value()) {
      throw InvalidParameter("witness is missing the state");
    }
    return t.kernel(a, b, *s);
  };
  if (condition == "factorizability") {
    require(w.outcome_a && w.outcome_b, "outcomes");
    const JointOutcomeDist k = kernel_at(w.a, w.b, w.state);
    return std::fabs(k.p(*w.outcome_a, *w.outcome_b) -
                     k.marginal_a().p(*w.outcome_a) *
                         k.marginal_b().p(*w.outcome_b));
  }
  if (condition == "outcome_independence" ||
      (condition == "strong_locality" && w.component == "conditional")) {
    const JointOutcomeDist k = kernel_at(w.a, w.b, w.state);
    if (w.side == "A") {
      require(w.outcome_a && w.outcome_b, "outcomes");
      const Direction& ref = condition == "strong_locality"
                                 ? (require(w.b_ref.has_value(), "b_ref"),
                                    *w.b_ref)
                                 : w.b;
      const OutcomeDist ref_marginal =
          kernel_at(w.a, ref, w.state).marginal_a();
      return std::fabs(k.conditional_a_given_b(*w.outcome_b).p(*w.outcome_a) -
                       ref_marginal.p(*w.outcome_a));
    }
    require(w.outcome_a && w.outcome_b, "outcomes");
    const Direction& ref =
        condition == "strong_locality"
            ? (require(w.a_ref.has_value(), "a_ref"), *w.a_ref)
            : w.a;
    const OutcomeDist ref_marginal = kernel_at(ref, w.b, w.state).marginal_b();
    return std::fabs(k.conditional_b_given_a(*w.outcome_a).p(*w.outcome_b) -
                     ref_marginal.p(*w.outcome_b));
  }
  if (condition == "parameter_independence" ||
      (condition == "strong_locality" && w.component == "marginal-spread")) {
    if (w.side == "A") {
      require(w.outcome_a.has_value(), "outcome A");
      require(w.b_ref.has_value(), "b_ref");
      return std::fabs(
          kernel_at(w.a, w.b, w.state).marginal_a().p(*w.outcome_a) -
          kernel_at(w.a, *w.b_ref, w.state).marginal_a().p(*w.outcome_a));
    }
    require(w.outcome_b.has_value(), "outcome B");
    require(w.a_ref.has_value(), "a_ref");
    return std::fabs(
        kernel_at(w.a, w.b, w.state).marginal_b().p(*w.outcome_b) -
        kernel_at(*w.a_ref, w.b, w.state).marginal_b().p(*w.outcome_b));
  }
  if (condition == "no_signaling") {
    if (w.side == "A") {
      require(w.outcome_a.has_value(), "outcome A");
      require(w.b_ref.has_value(), "b_ref");
      return std::fabs(
          ensemble_average(t, w.a, w.b, grid.states)
              .marginal_a()
              .p(*w.outcome_a) -
          ensemble_average(t, w.a, *w.b_ref, grid.states)
              .marginal_a()
              .p(*w.outcome_a));
    }
    require(w.outcome_b.has_value(), "outcome B");
    require(w.a_ref.has_value(), "a_ref");
    return std::fabs(ensemble_average(t, w.a, w.b, grid.states)
                         .marginal_b()
                         .p(*w.outcome_b) -
                     ensemble_average(t, *w.a_ref, w.b, grid.states)
                         .marginal_b()
                         .p(*w.outcome_b));
  }
  if (condition == "measurement_independence") {
    if (!t.setting_dependent_ensemble) {
      throw InvalidParameter(
          "theory has no setting-dependent ensemble to replay against");
    }
    require(w.a_ref.has_value() && w.b_ref.has_value(), "reference settings");
    return tv_distance(t.setting_dependent_ensemble(w.a, w.b),
                       t.setting_dependent_ensemble(*w.a_ref, *w.b_ref));
  }
  throw InvalidParameter("unknown condition: " + condition);
}

}  // namespace belllab
