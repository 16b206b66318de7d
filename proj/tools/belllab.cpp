// belllab: audit locality conditions, evaluate CHSH, and simulate trial
// logs for two-wing theories. Reports are single JSON documents printed to
// stdout and optionally written (atomically) to --out.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "belllab/conditions.hpp"
#include "belllab/errors.hpp"
#include "belllab/inequality.hpp"
#include "belllab/json_io.hpp"
#include "belllab/montecarlo.hpp"
#include "belllab/theories.hpp"

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr const char* kSchemaId = "belllab-report/1";

using belllab::Json;

// Everything needed to rebuild the theory later; embedded in every report
// so --replay-witness can reconstruct the run.
struct TheorySpec {
  std::string base;
  std::vector<std::string> transforms;
  std::uint64_t seed = 1729;
  int lambda_samples = 512;
  int quadrature_nodes = 0;
  int n_counters = 4;
  std::string strategy_file;
};

struct StrategyFile {
  std::vector<belllab::Direction> settings;
  std::vector<belllab::LhvStrategy> strategies;
};

StrategyFile load_strategy_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw belllab::InvalidParameter("cannot open strategy file: " + path);
  }
  const Json j = Json::parse(in);
  StrategyFile out;
  if (j.contains("angles_deg")) {
    for (const Json& deg : j.at("angles_deg")) {
      out.settings.push_back(belllab::Direction::from_plane_angle(
          deg.get<double>() * kPi / 180.0));
    }
  } else if (j.contains("settings")) {
    for (const Json& d : j.at("settings")) {
      out.settings.push_back(belllab::direction_from_json(d));
    }
  } else {
    throw belllab::InvalidParameter(
        "strategy file needs \"angles_deg\" or \"settings\"");
  }
  if (!j.contains("strategies") || j.at("strategies").empty()) {
    throw belllab::InvalidParameter("strategy file needs \"strategies\"");
  }
  const double uniform =
      1.0 / static_cast<double>(j.at("strategies").size());
  for (const Json& s : j.at("strategies")) {
    belllab::LhvStrategy st;
    for (const Json& v : s.at("a")) {
      st.outcomes_a.emplace_back(v.get<int>());
    }
    for (const Json& v : s.at("b")) {
      st.outcomes_b.emplace_back(v.get<int>());
    }
    st.weight = s.value("weight", uniform);
    out.strategies.push_back(std::move(st));
  }
  return out;
}

belllab::Theory build_theory(const TheorySpec& spec) {
  belllab::TheoryOptions options;
  options.seed = spec.seed;
  options.quadrature_nodes = spec.quadrature_nodes;
  options.n_counters = spec.n_counters;
  if (!spec.strategy_file.empty()) {
    StrategyFile s = load_strategy_file(spec.strategy_file);
    options.lhv_settings = std::move(s.settings);
    options.lhv_strategies = std::move(s.strategies);
  }
  belllab::Theory t = belllab::make_theory(spec.base, options);
  for (const std::string& transform : spec.transforms) {
    t = belllab::apply_transform(t, transform);
  }
  return t;
}

Json to_json(const TheorySpec& spec, const std::string& resolved_name) {
  Json j;
  j["name"] = resolved_name;
  j["base"] = spec.base;
  j["transforms"] = spec.transforms;
  j["seed"] = spec.seed;
  j["lambda_samples"] = spec.lambda_samples;
  j["quadrature_nodes"] = spec.quadrature_nodes;
  j["n_counters"] = spec.n_counters;
  j["strategy_file"] = spec.strategy_file;
  return j;
}

TheorySpec theory_spec_from_json(const Json& j) {
  TheorySpec spec;
  spec.base = j.at("base").get<std::string>();
  spec.transforms = j.at("transforms").get<std::vector<std::string>>();
  spec.seed = j.at("seed").get<std::uint64_t>();
  spec.lambda_samples = j.at("lambda_samples").get<int>();
  spec.quadrature_nodes = j.at("quadrature_nodes").get<int>();
  spec.n_counters = j.at("n_counters").get<int>();
  spec.strategy_file = j.at("strategy_file").get<std::string>();
  return spec;
}

// Settings passed on the command line: planar angles in degrees and/or
// explicit unit vectors, in flag order (angles first).
std::vector<belllab::Direction> parse_settings(
    const std::vector<double>& angles_deg,
    const std::vector<std::string>& dirs) {
  std::vector<belllab::Direction> out;
  for (double deg : angles_deg) {
    out.push_back(belllab::Direction::from_plane_angle(deg * kPi / 180.0));
  }
  for (const std::string& d : dirs) {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    char c1 = 0;
    char c2 = 0;
    std::istringstream in(d);
    if (!(in >> x >> c1 >> y >> c2 >> z) || c1 != ',' || c2 != ',') {
      throw belllab::InvalidParameter("--dir expects x,y,z: " + d);
    }
    out.push_back(belllab::Direction::normalized(x, y, z));
  }
  return out;
}

void write_file_atomically(const std::string& path, const std::string& data) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) {
    fs::create_directories(target.parent_path());
  }
  fs::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw belllab::InvalidParameter("cannot open output file: " +
                                      tmp.string());
    }
    out << data;
    out.flush();
    if (!out) {
      throw belllab::InvalidParameter("failed writing output file: " +
                                      tmp.string());
    }
  }
  fs::rename(tmp, target);
}

void emit_report(const Json& report, const std::string& out_path) {
  const std::string text = report.dump(2) + "\n";
  std::cout << text;
  if (!out_path.empty()) {
    write_file_atomically(out_path, text);
  }
}

// Shared per-subcommand flag bundle.
struct CommonFlags {
  TheorySpec spec;
  std::vector<double> angles_deg;
  std::vector<std::string> dirs;
  int grid_n = 8;
  double tol = belllab::kDefaultAuditTol;
  std::string out_path;
};

void add_theory_flags(CLI::App* cmd, CommonFlags& flags, bool require_theory) {
  auto* theory =
      cmd->add_option("--theory", flags.spec.base, "registry theory name");
  if (require_theory) {
    theory->required();
  }
  cmd->add_option("--transform", flags.spec.transforms,
                  "transform as kind:arg, applied left to right (repeatable)");
  cmd->add_option("--seed", flags.spec.seed,
                  "RNG seed (falls back to BELLLAB_SEED, then 1729)")
      ->envname("BELLLAB_SEED");
  cmd->add_option("--lambda-samples", flags.spec.lambda_samples,
                  "states drawn from sampler ensembles for audit grids")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--quadrature-nodes", flags.spec.quadrature_nodes,
                  "polar node count for classical-antiparallel quadrature "
                  "mode (0 = sampler mode)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--n-counters", flags.spec.n_counters,
                  "counter count for einstein-boxes")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--strategy-file", flags.spec.strategy_file,
                  "JSON strategy mixture for lhv-deterministic");
}

void add_setting_flags(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--angles", flags.angles_deg,
                  "comma-separated planar setting angles in degrees")
      ->delimiter(',');
  cmd->add_option("--dir", flags.dirs,
                  "setting as x,y,z components (repeatable)");
}

belllab::AuditGrid build_grid(const belllab::Theory& t,
                              const CommonFlags& flags) {
  belllab::AuditGrid::Options options;
  options.seed = flags.spec.seed;
  options.coplanar_count = flags.grid_n;
  options.state_samples = flags.spec.lambda_samples;
  belllab::AuditGrid grid = belllab::AuditGrid::make_default(t, options);
  const std::vector<belllab::Direction> settings =
      parse_settings(flags.angles_deg, flags.dirs);
  if (!settings.empty()) {
    grid.settings_a = settings;
    grid.settings_b = settings;
  }
  return grid;
}

int cmd_audit(const CommonFlags& flags) {
  const belllab::Theory t = build_theory(flags.spec);
  const belllab::AuditGrid grid = build_grid(t, flags);
  const double tol = flags.tol;

  Json report;
  report["schema"] = kSchemaId;
  report["kind"] = "audit";
  report["theory"] = to_json(flags.spec, t.name);
  report["grid"] = belllab::to_json(grid);
  report["tolerance"] = tol;

  const belllab::DecompositionReport decomposition =
      belllab::verify_decomposition(t, grid, tol);
  Json conditions = Json::array();
  conditions.push_back(belllab::to_json(decomposition.strong_locality));
  conditions.push_back(belllab::to_json(decomposition.factorizability));
  conditions.push_back(belllab::to_json(decomposition.parameter_independence));
  conditions.push_back(belllab::to_json(decomposition.outcome_independence));
  conditions.push_back(
      belllab::to_json(belllab::check_no_signaling(t, grid, tol)));
  conditions.push_back(
      belllab::to_json(belllab::check_measurement_independence(t, grid, tol)));
  report["conditions"] = std::move(conditions);
  report["decomposition"] = belllab::to_json(decomposition);

  emit_report(report, flags.out_path);
  return 0;
}

int cmd_replay(const std::string& report_path, const std::string& out_path) {
  std::ifstream in(report_path);
  if (!in) {
    throw belllab::InvalidParameter("cannot open report: " + report_path);
  }
  const Json source = Json::parse(in);
  if (source.value("kind", std::string{}) != "audit") {
    throw belllab::InvalidParameter(
        "--replay-witness expects an audit report");
  }
  const TheorySpec spec = theory_spec_from_json(source.at("theory"));
  const belllab::Theory t = build_theory(spec);
  const belllab::AuditGrid grid =
      belllab::audit_grid_from_json(t, source.at("grid"));

  Json report;
  report["schema"] = kSchemaId;
  report["kind"] = "replay";
  report["source"] = report_path;
  report["theory"] = to_json(spec, t.name);
  Json replays = Json::array();
  bool all_matched = true;
  for (const Json& entry : source.at("conditions")) {
    if (!entry.contains("witness") || entry.at("witness").is_null()) {
      continue;
    }
    const std::string condition = entry.at("condition").get<std::string>();
    const belllab::Witness witness =
        belllab::witness_from_json(entry.at("witness"));
    const double reported = entry.at("max_deviation").get<double>();
    const double replayed =
        belllab::replay_witness(t, condition, witness, grid);
    const double diff = std::fabs(replayed - reported);
    const bool matched = diff <= belllab::kExactTol;
    all_matched = all_matched && matched;
    Json r;
    r["condition"] = condition;
    r["reported"] = reported;
    r["replayed"] = replayed;
    r["abs_diff"] = diff;
    r["matched"] = matched;
    replays.push_back(std::move(r));
  }
  report["replays"] = std::move(replays);
  report["all_matched"] = all_matched;

  emit_report(report, out_path);
  return 0;
}

int cmd_chsh(const CommonFlags& flags, bool search, double resolution_deg) {
  const belllab::Theory t = build_theory(flags.spec);
  const std::vector<belllab::Direction> settings =
      parse_settings(flags.angles_deg, flags.dirs);

  Json report;
  report["schema"] = kSchemaId;
  report["kind"] = "chsh";
  report["theory"] = to_json(flags.spec, t.name);

  belllab::CorrelationOptions correlation_options;
  correlation_options.seed = flags.spec.seed;

  if (search) {
    if (!settings.empty()) {
      throw belllab::InvalidParameter(
          "--search and explicit settings are mutually exclusive");
    }
    const double resolution = resolution_deg * kPi / 180.0;
    const belllab::ChshSearchResult result =
        belllab::chsh_search(t, resolution, correlation_options);
    report["search"] = belllab::to_json(result);
  } else {
    if (settings.size() != 4) {
      throw belllab::InvalidParameter(
          "chsh needs exactly four settings (a, a', b, b') via --angles "
          "and/or --dir, or --search");
    }
    belllab::ChshSettings chsh_settings;
    chsh_settings.a = settings[0];
    chsh_settings.a_prime = settings[1];
    chsh_settings.b = settings[2];
    chsh_settings.b_prime = settings[3];
    const belllab::ChshResult result =
        belllab::chsh_value(t, chsh_settings, correlation_options);
    Json j = belllab::to_json(result);
    j["abs_s"] = std::fabs(result.s);
    j["settings"]["a"] = belllab::to_json(chsh_settings.a);
    j["settings"]["a_prime"] = belllab::to_json(chsh_settings.a_prime);
    j["settings"]["b"] = belllab::to_json(chsh_settings.b);
    j["settings"]["b_prime"] = belllab::to_json(chsh_settings.b_prime);
    report["result"] = std::move(j);
  }

  emit_report(report, flags.out_path);
  return 0;
}

int cmd_simulate(const CommonFlags& flags, std::int64_t trials, int workers,
                 double tol_sigma, const std::string& csv_path) {
  if (trials < 1) {
    throw belllab::InvalidParameter("simulate needs --trials >= 1");
  }
  const belllab::Theory t = build_theory(flags.spec);
  std::vector<belllab::Direction> settings =
      parse_settings(flags.angles_deg, flags.dirs);
  if (settings.empty()) {
    if (!t.declared_settings.empty()) {
      settings = t.declared_settings;
    } else {
      for (double deg : {0.0, 45.0, 90.0, 135.0}) {
        settings.push_back(
            belllab::Direction::from_plane_angle(deg * kPi / 180.0));
      }
    }
  }

  const belllab::TrialLog log =
      belllab::run_trials(t, settings, settings, trials, flags.spec.seed,
                          workers);
  if (!csv_path.empty()) {
    write_file_atomically(csv_path, belllab::to_csv(log));
  }

  Json report;
  report["schema"] = kSchemaId;
  report["kind"] = "simulate";
  report["theory"] = to_json(flags.spec, t.name);
  Json settings_json = Json::array();
  for (const auto& d : settings) {
    settings_json.push_back(belllab::to_json(d));
  }
  report["settings_a"] = settings_json;
  report["settings_b"] = settings_json;
  report["trials"] = trials;
  report["workers"] = workers;
  report["seed"] = flags.spec.seed;
  report["csv_path"] = csv_path;
  report["tol_sigma"] = tol_sigma;

  belllab::CorrelationOptions correlation_options;
  correlation_options.seed = flags.spec.seed;
  Json empirical = Json::array();
  for (std::size_t i = 0; i < settings.size(); ++i) {
    for (std::size_t j = 0; j < settings.size(); ++j) {
      Json e;
      e["a_index"] = static_cast<int>(i);
      e["b_index"] = static_cast<int>(j);
      try {
        const belllab::EmpiricalCorrelation emp = belllab::empirical_correlation(
            log, static_cast<int>(i), static_cast<int>(j));
        e["estimate"] = emp.estimate;
        e["std_error"] = emp.std_error;
        e["count"] = emp.count;
      } catch (const belllab::NoMatchingTrials&) {
        e["count"] = 0;
      }
      e["analytic"] =
          belllab::correlation(t, settings[i], settings[j], correlation_options)
              .value;
      empirical.push_back(std::move(e));
    }
  }
  report["empirical"] = std::move(empirical);

  Json audit = Json::array();
  for (const belllab::ConditionReport& r :
       belllab::empirical_audit(log, t, tol_sigma)) {
    audit.push_back(belllab::to_json(r));
  }
  report["audit"] = std::move(audit);

  emit_report(report, flags.out_path);
  return 0;
}

int cmd_list(const std::string& out_path) {
  Json report;
  report["schema"] = kSchemaId;
  report["kind"] = "list";
  Json theories = Json::array();
  for (const auto& [name, description] : belllab::list_theories()) {
    Json t;
    t["name"] = name;
    t["description"] = description;
    theories.push_back(std::move(t));
  }
  report["theories"] = std::move(theories);
  report["partitions"] = Json::array({"single-cell", "hemisphere-z"});
  report["laws"] = Json::array({"singlet-superdet", "constant"});
  report["transform_syntax"] =
      Json::array({"coarse-grain:<partition>", "inject:<law>"});
  emit_report(report, out_path);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "belllab: locality-condition audits, CHSH evaluation, and trial "
      "simulation for two-wing theories"};
  app.require_subcommand(1);

  CommonFlags audit_flags;
  std::string replay_path;
  auto* audit = app.add_subcommand(
      "audit", "audit locality conditions on a theory, or replay a report's "
               "witnesses");
  add_theory_flags(audit, audit_flags, /*require_theory=*/false);
  add_setting_flags(audit, audit_flags);
  audit->add_option("--grid-n", audit_flags.grid_n,
                    "coplanar settings per wing on the default grid")
      ->check(CLI::PositiveNumber);
  audit->add_option("--tol", audit_flags.tol, "audit tolerance")
      ->check(CLI::PositiveNumber);
  audit->add_option("--out", audit_flags.out_path, "write the report here");
  audit->add_option("--replay-witness", replay_path,
                    "existing audit report whose witnesses to replay");

  CommonFlags chsh_flags;
  bool search = false;
  double resolution_deg = 11.25;
  auto* chsh = app.add_subcommand("chsh", "evaluate CHSH at four settings "
                                          "or search for max |S|");
  add_theory_flags(chsh, chsh_flags, /*require_theory=*/true);
  add_setting_flags(chsh, chsh_flags);
  chsh->add_flag("--search", search, "grid-search for the maximal |S|");
  chsh->add_option("--resolution", resolution_deg,
                   "search resolution in degrees")
      ->check(CLI::PositiveNumber);
  chsh->add_option("--out", chsh_flags.out_path, "write the report here");

  CommonFlags simulate_flags;
  std::int64_t trials = 0;
  int workers = 1;
  double tol_sigma = belllab::kDefaultSigma;
  std::string csv_path;
  auto* simulate =
      app.add_subcommand("simulate", "simulate seeded trials and audit the "
                                     "log against the theory");
  add_theory_flags(simulate, simulate_flags, /*require_theory=*/true);
  add_setting_flags(simulate, simulate_flags);
  simulate->add_option("--trials", trials, "number of trials (>= 1)")
      ->required();
  simulate->add_option("--workers", workers, "worker threads")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--tol-sigma", tol_sigma,
                       "z-score tolerance for the empirical audit")
      ->check(CLI::PositiveNumber);
  simulate->add_option("--csv", csv_path, "write the trial log CSV here");
  simulate->add_option("--out", simulate_flags.out_path,
                       "write the report here");

  std::string list_out;
  auto* list = app.add_subcommand("list", "list registry contents");
  list->add_option("--out", list_out, "write the listing here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (audit->parsed()) {
      if (!replay_path.empty()) {
        return cmd_replay(replay_path, audit_flags.out_path);
      }
      if (audit_flags.spec.base.empty()) {
        throw belllab::InvalidParameter(
            "audit needs --theory (or --replay-witness)");
      }
      return cmd_audit(audit_flags);
    }
    if (chsh->parsed()) {
      return cmd_chsh(chsh_flags, search, resolution_deg);
    }
    if (simulate->parsed()) {
      return cmd_simulate(simulate_flags, trials, workers, tol_sigma,
                          csv_path);
    }
    return cmd_list(list_out);
  } catch (const belllab::InvalidParameter& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const belllab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
}
