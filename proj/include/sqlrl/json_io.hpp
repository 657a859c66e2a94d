#pragma once

#include <json.hpp>

#include "sqlrl/eval.hpp"
#include "sqlrl/policy_sim.hpp"
#include "sqlrl/reward.hpp"
#include "sqlrl/selector.hpp"

namespace sqlrl {

using Json = nlohmann::json;

Json to_json(const RewardBreakdown& r);
Json to_json(const ScoredResponse& s);
Json to_json(const SelectionResult& s);
Json to_json(const EvaluationReport& report);
Json to_json(const sim::StepMetrics& m);
Json to_json(const LengthStats& l);
Json to_json(const PoolStats& p);

/// Reads {response, think, answer, sql}; all four are required.
/// Throws InvalidInput with the offending key.
LengthStats length_stats_from_json(const Json& j);

/// null, integer, real or string; blobs become {"blob": hex}.
Json cell_to_json(const Cell& cell);

}  // namespace sqlrl
