#pragma once

#include <string>

#include "json.hpp"

#include "belllab/conditions.hpp"
#include "belllab/inequality.hpp"
#include "belllab/montecarlo.hpp"

namespace belllab {

using Json = nlohmann::json;

// JSON forms used by the report files. Doubles round-trip exactly
// (shortest-representation printing), which witness replay relies on.

Json to_json(const Direction& d);
Direction direction_from_json(const Json& j);

Json to_json(const HiddenState& s);
HiddenState hidden_state_from_json(const Json& j);

Json to_json(const Witness& w);
Witness witness_from_json(const Json& j);

Json to_json(const ConditionReport& r);
ConditionReport condition_report_from_json(const Json& j);

Json to_json(const DecompositionReport& r);

Json to_json(const CorrelationEstimate& e);
Json to_json(const ChshResult& r);
Json to_json(const ChshSearchResult& r);

// Grid summary: settings verbatim, plus (seed, state count) so sampled
// states can be redrawn exactly.
Json to_json(const AuditGrid& grid);
AuditGrid audit_grid_from_json(const Theory& t, const Json& j);

}  // namespace belllab
