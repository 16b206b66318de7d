#include "belllab/json_io.hpp"

#include <variant>

#include "belllab/errors.hpp"
#include "belllab/rng.hpp"

namespace belllab {

Json to_json(const Direction& d) { return Json::array({d.x(), d.y(), d.z()}); }

Direction direction_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw InvalidParameter("direction JSON must be a 3-element array");
  }
  return Direction(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

Json to_json(const HiddenState& s) {
  Json j;
  j["tag"] = s.space_tag;
  if (std::holds_alternative<std::monostate>(s.payload)) {
    j["kind"] = "unit";
  } else if (const auto* d = std::get_if<Direction>(&s.payload)) {
    j["kind"] = "direction";
    j["value"] = to_json(*d);
  } else if (const auto* c = std::get_if<std::int64_t>(&s.payload)) {
    j["kind"] = "cell";
    j["value"] = *c;
  } else {
    const auto& pair = std::get<OutcomePair>(s.payload);
    j["kind"] = "pair";
    j["value"] = Json::array({pair.a.value(), pair.b.value()});
  }
  return j;
}

HiddenState hidden_state_from_json(const Json& j) {
  HiddenState s;
  s.space_tag = j.at("tag").get<std::string>();
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "unit") {
    s.payload = std::monostate{};
  } else if (kind == "direction") {
    s.payload = direction_from_json(j.at("value"));
  } else if (kind == "cell") {
    s.payload = j.at("value").get<std::int64_t>();
  } else if (kind == "pair") {
    const Json& v = j.at("value");
    s.payload = OutcomePair{Outcome(v.at(0).get<int>()),
                            Outcome(v.at(1).get<int>())};
  } else {
    throw InvalidParameter("unknown hidden-state kind: " + kind);
  }
  return s;
}

Json to_json(const Witness& w) {
  Json j;
  j["side"] = w.side;
  j["component"] = w.component;
  j["a"] = to_json(w.a);
  j["b"] = to_json(w.b);
  if (w.a_ref) {
    j["a_ref"] = to_json(*w.a_ref);
  }
  if (w.b_ref) {
    j["b_ref"] = to_json(*w.b_ref);
  }
  if (w.state) {
    j["state"] = to_json(*w.state);
  }
  if (w.outcome_a) {
    j["outcome_a"] = w.outcome_a->value();
  }
  if (w.outcome_b) {
    j["outcome_b"] = w.outcome_b->value();
  }
  return j;
}

Witness witness_from_json(const Json& j) {
  Witness w;
  w.side = j.at("side").get<std::string>();
  w.component = j.at("component").get<std::string>();
  w.a = direction_from_json(j.at("a"));
  w.b = direction_from_json(j.at("b"));
  if (j.contains("a_ref")) {
    w.a_ref = direction_from_json(j.at("a_ref"));
  }
  if (j.contains("b_ref")) {
    w.b_ref = direction_from_json(j.at("b_ref"));
  }
  if (j.contains("state")) {
    w.state = hidden_state_from_json(j.at("state"));
  }
  if (j.contains("outcome_a")) {
    w.outcome_a = Outcome(j.at("outcome_a").get<int>());
  }
  if (j.contains("outcome_b")) {
    w.outcome_b = Outcome(j.at("outcome_b").get<int>());
  }
  return w;
}

Json to_json(const ConditionReport& r) {
  Json j;
  j["condition"] = r.condition;
  j["pass"] = r.pass;
  j["max_deviation"] = r.max_deviation;
  j["tolerance"] = r.tolerance;
  j["witness"] = r.witness ? to_json(*r.witness) : Json(nullptr);
  j["evaluated_points"] = r.evaluated_points;
  j["skipped_points"] = r.skipped_points;
  j["note"] = r.note;
  return j;
}

ConditionReport condition_report_from_json(const Json& j) {
  ConditionReport r;
  r.condition = j.at("condition").get<std::string>();
  r.pass = j.at("pass").get<bool>();
  r.max_deviation = j.at("max_deviation").get<double>();
  r.tolerance = j.at("tolerance").get<double>();
  if (j.contains("witness") && !j.at("witness").is_null()) {
    r.witness = witness_from_json(j.at("witness"));
  }
  r.evaluated_points = j.at("evaluated_points").get<std::int64_t>();
  r.skipped_points = j.at("skipped_points").get<std::int64_t>();
  r.note = j.value("note", std::string{});
  return r;
}

Json to_json(const DecompositionReport& r) {
  Json j;
  j["strong_locality"] = to_json(r.strong_locality);
  j["parameter_independence"] = to_json(r.parameter_independence);
  j["outcome_independence"] = to_json(r.outcome_independence);
  j["factorizability"] = to_json(r.factorizability);
  j["equivalence_holds"] = r.equivalence_holds;
  return j;
}

Json to_json(const CorrelationEstimate& e) {
  Json j;
  j["value"] = e.value;
  j["std_error"] = e.std_error;
  j["samples"] = e.samples;
  j["method"] = e.method;
  return j;
}

Json to_json(const ChshResult& r) {
  Json j;
  j["s"] = r.s;
  j["terms"] = Json::array({to_json(r.terms[0]), to_json(r.terms[1]),
                            to_json(r.terms[2]), to_json(r.terms[3])});
  return j;
}

Json to_json(const ChshSearchResult& r) {
  Json j;
  j["settings"]["a"] = to_json(r.settings.a);
  j["settings"]["a_prime"] = to_json(r.settings.a_prime);
  j["settings"]["b"] = to_json(r.settings.b);
  j["settings"]["b_prime"] = to_json(r.settings.b_prime);
  j["plane_angles"] = r.plane_angles;
  j["s"] = r.s;
  j["abs_s"] = r.abs_s;
  return j;
}

Json to_json(const AuditGrid& grid) {
  Json j;
  Json sa = Json::array();
  for (const auto& d : grid.settings_a) {
    sa.push_back(to_json(d));
  }
  Json sb = Json::array();
  for (const auto& d : grid.settings_b) {
    sb.push_back(to_json(d));
  }
  j["settings_a"] = std::move(sa);
  j["settings_b"] = std::move(sb);
  j["state_count"] = static_cast<std::int64_t>(grid.states.size());
  j["seed"] = grid.seed;
  return j;
}

AuditGrid audit_grid_from_json(const Theory& t, const Json& j) {
  AuditGrid grid;
  grid.seed = j.at("seed").get<std::uint64_t>();
  for (const Json& d : j.at("settings_a")) {
    grid.settings_a.push_back(direction_from_json(d));
  }
  for (const Json& d : j.at("settings_b")) {
    grid.settings_b.push_back(direction_from_json(d));
  }
  if (t.ensemble.is_finite()) {
    grid.states = t.ensemble.states();
  } else {
    // Sampled states are not stored; they are redrawn from the recorded
    // seed and count, which reproduces them bit for bit.
    const auto n = j.at("state_count").get<std::int64_t>();
    if (n < 1) {
      throw InvalidParameter("grid state_count must be positive");
    }
    const double w = 1.0 / static_cast<double>(n);
    for (std::int64_t i = 0; i < n; ++i) {
      RngStream rng(grid.seed, streams::kGridStates,
                    static_cast<std::uint64_t>(i));
      grid.states.push_back(WeightedState{t.ensemble.draw(rng), w});
    }
  }
  return grid;
}

}  // namespace belllab
