#pragma once

#include "crsmdp/model.hpp"
#include "crsmdp/policy_eval.hpp"

#include <limits>
#include <optional>
#include <string_view>
#include <vector>

namespace crsmdp {

/// Lower: constraints tightened so every feasible policy is feasible for the
/// infinite-horizon problem. Upper: loosened so the infinite-horizon feasible
/// set is contained. Original: the untruncated constraints.
enum class BoundMode { Lower, Upper, Original };

std::string_view to_string(BoundMode mode);
std::optional<BoundMode> parse_bound_mode(std::string_view text);

/// Effective bound and horizon of one constraint; horizon 0 means infinite.
struct EffectiveConstraint {
    double bound = 0.0;
    int horizon = 0;
};

struct TruncatedBounds {
    BoundMode mode = BoundMode::Original;
    int horizon = 0;  // 0 for Original
    std::vector<EffectiveConstraint> constraints;
};

inline constexpr double kDefaultFeasibilityTol = 1e-9;

/// Discounted infinite-horizon bounds move by K beta^T, risk-sensitive ones are
/// divided (Lower) or multiplied (Upper) by K_T; finite-horizon constraints keep
/// their own bound and horizon. Lower/Upper need T >= every finite horizon.
TruncatedBounds truncation_bounds(const MdpModel& model, std::optional<int> T, BoundMode mode);
TruncatedBounds truncation_bounds(const MdpModel& model, std::optional<int> T, BoundMode mode,
                                  const CostBounds& bounds);

struct FeasibilityVerdict {
    bool feasible = true;
    std::vector<double> slack;  // bound - achieved, in model constraint order
    double max_violation = -std::numeric_limits<double>::infinity();
};

/// Achieved constraint values at the initial state. Infinite-horizon
/// risk-sensitive constraints report their certified interval.
struct ConstraintValue {
    double value = 0.0;
    double radius = 0.0;
};

/// Evaluates every constraint against `bounds`. Risk-sensitive infinite-horizon
/// constraints use a certified interval with radius <= tol/10 and count as
/// satisfied only if the interval's upper end is within the bound.
FeasibilityVerdict check_feasibility(const MarkovPolicy& policy, const MdpModel& model,
                                     const TruncatedBounds& bounds,
                                     double tol = kDefaultFeasibilityTol);
FeasibilityVerdict check_feasibility(const MarkovPolicy& policy, const MdpModel& model,
                                     std::optional<int> T, BoundMode mode,
                                     double tol = kDefaultFeasibilityTol);

std::vector<ConstraintValue> constraint_values(const MarkovPolicy& policy, const MdpModel& model,
                                               const TruncatedBounds& bounds, double tol);

/// Largest (achieved - bound) over the original constraints, measured against
/// the midpoint of certified intervals; -infinity when there are no constraints.
double max_violation(const MarkovPolicy& policy, const MdpModel& model,
                     double tol = kDefaultFeasibilityTol);

bool is_eps_feasible(const MarkovPolicy& policy, const MdpModel& model, double eps,
                     double tol = kDefaultFeasibilityTol);

/// Smallest T with K beta^T <= eps/2 and exp(|g|K)(K_T - 1) <= eps/2.
int horizon_for_epsilon(const MdpModel& model, double eps, int max_horizon = kDefaultMaxHorizon);
int horizon_for_epsilon(const CostBounds& bounds, double eps, int max_horizon = kDefaultMaxHorizon);

}  // namespace crsmdp
