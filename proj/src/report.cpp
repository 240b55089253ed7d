#include "crsmdp/report.hpp"

#include "crsmdp/model_io.hpp"

#include <algorithm>
#include <cmath>

namespace crsmdp {

using nlohmann::json;

namespace {

// JSON has no infinities; an empty maximum is reported as null.
json finite_or_null(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

}  // namespace

json verdict_to_json(const FeasibilityVerdict& verdict) {
    return {{"feasible", verdict.feasible},
            {"slacks", verdict.slack},
            {"max_violation", finite_or_null(verdict.max_violation)}};
}

json certified_to_json(const CertifiedValue& value) {
    return {{"value", value.value}, {"radius", value.radius}, {"horizon_used", value.horizon_used}};
}

json report_to_json(const SolveReport& report) {
    json doc;
    doc["mode"] = std::string(to_string(report.mode));
    doc["horizon"] = report.horizon;
    doc["status"] = std::string(to_string(report.status));
    doc["value"] = report.status == LpStatus::Optimal ? json(report.optimal_value) : json(nullptr);
    doc["policy"] = report.policy ? policy_to_json(*report.policy) : json(nullptr);
    doc["tail"] = report.tail.to_string();

    if (report.feasibility) {
        json f = verdict_to_json(*report.feasibility);
        const double h = report.max_violation.value_or(-INFINITY);
        f["h"] = finite_or_null(h);
        // Smallest epsilon for which the policy is epsilon-feasible.
        f["epsilon_feasible_level"] = std::isfinite(h) ? std::max(h, 0.0) : 0.0;
        doc["feasibility"] = std::move(f);
    } else {
        doc["feasibility"] = nullptr;
    }
    doc["certified_objective"] =
        report.certified_objective ? certified_to_json(*report.certified_objective) : json(nullptr);
    if (report.extracted_value)
        doc["extraction"] = {{"finite_horizon_value", *report.extracted_value},
                             {"gap", *report.extraction_gap}};
    else
        doc["extraction"] = nullptr;

    json bounds = json::array();
    for (const auto& c : report.bounds.constraints)
        bounds.push_back({{"bound", c.bound}, {"horizon", c.horizon}});
    doc["bounds"] = std::move(bounds);

    doc["stats"] = {{"layer_sizes", report.stats.layer_sizes},
                    {"lp_rows", report.stats.lp_rows},
                    {"lp_columns", report.stats.lp_columns},
                    {"pivots", report.stats.pivots},
                    {"merge_tolerance", report.merge_tolerance},
                    {"wall_seconds", report.stats.wall_seconds}};
    return doc;
}

}  // namespace crsmdp
