#pragma once

#include "crsmdp/augmented_lp.hpp"

#include <nlohmann/json.hpp>

namespace crsmdp {

nlohmann::json verdict_to_json(const FeasibilityVerdict& verdict);
nlohmann::json certified_to_json(const CertifiedValue& value);

/// mode, horizon, status, value, policy, feasibility, certified_objective,
/// extraction, bounds, stats.
nlohmann::json report_to_json(const SolveReport& report);

}  // namespace crsmdp
