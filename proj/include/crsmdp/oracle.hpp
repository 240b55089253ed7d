#pragma once

// Brute-force references. Nothing here calls into policy_eval or the LP code,
// so the two can be checked against each other.

#include "crsmdp/model.hpp"
#include "crsmdp/truncation.hpp"

#include <vector>

namespace crsmdp::oracle {

inline constexpr double kEnumerationBudget = 1e6;

struct Trajectory {
    std::vector<int> states;   // X_0..X_T
    std::vector<int> actions;  // A_0..A_{T-1}
    double probability = 0.0;
    std::vector<double> discounted_cost;  // one per cost matrix passed in
};

/// Every positive-probability trajectory of length T from `start`.
/// Throws Error("enumeration budget exceeded") when (m n)^T > 1e6.
std::vector<Trajectory> enumerate_trajectories(const MarkovPolicy& policy,
                                               const std::vector<Matrix>& costs, int T,
                                               const MdpModel& model, int start);

double enumerate_paths_rs_cost(const MarkovPolicy& policy, const Matrix& cost, int T,
                               const MdpModel& model);
double enumerate_paths_rs_cost(const MarkovPolicy& policy, const Matrix& cost, int T,
                               const MdpModel& model, int start);
double enumerate_paths_discounted(const MarkovPolicy& policy, const Matrix& cost, int T,
                                  const MdpModel& model);
double enumerate_paths_discounted(const MarkovPolicy& policy, const Matrix& cost, int T,
                                  const MdpModel& model, int start);

struct DpResult {
    double value = 0.0;  // at the initial state
    Vector values;       // per initial state
    std::vector<DecisionRule> rules;
};

/// Multiplicative backward induction for the unconstrained finite-horizon
/// risk-sensitive problem; ties go to the lowest action index.
DpResult dp_unconstrained_rs(const MdpModel& model, int T);

struct GridResult {
    bool found = false;
    double value = 0.0;
    MarkovPolicy policy;
    long evaluated = 0;
};

inline constexpr double kGridBudget = 2e6;

/// Exhaustive search over Markov policies whose rows are (q, 1-q) with q on a
/// grid of `resolution` points; keeps the best policy that satisfies `bounds`
/// (evaluated at each constraint's effective finite horizon). Needs m <= 2,
/// n == 2, T <= 3 and resolution in {11, 21, 41}.
GridResult grid_search_constrained(const MdpModel& model, int T, int resolution,
                                   const TruncatedBounds& bounds,
                                   double tol = kDefaultFeasibilityTol);

}  // namespace crsmdp::oracle
