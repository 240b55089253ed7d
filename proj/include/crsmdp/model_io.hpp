#pragma once

#include "crsmdp/model.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>

namespace crsmdp {

struct LoadOptions {
    /// Rescale transition rows that are within kStochasticTol of summing to one.
    bool renormalize = true;
};

/// Parses the JSON model document. Structural problems throw Error; invariant
/// violations are reported by validate_model, which the loader runs and
/// raises on.
MdpModel model_from_json(const nlohmann::json& doc, const LoadOptions& options = {});
MdpModel load_model(const std::filesystem::path& path, const LoadOptions& options = {});
nlohmann::json model_to_json(const MdpModel& model);

nlohmann::json matrix_to_json(const Matrix& matrix);
Matrix matrix_from_json(const nlohmann::json& rows, const char* what);

/// {"rules": [m x n ...], "tail": m x n}
nlohmann::json policy_to_json(const MarkovPolicy& policy);
/// Accepts the object above, or any document carrying it under "policy"
/// (so a solve report can be fed back in directly).
MarkovPolicy policy_from_json(const nlohmann::json& doc);
MarkovPolicy load_policy(const std::filesystem::path& path);

nlohmann::json read_json_file(const std::filesystem::path& path);

}  // namespace crsmdp
