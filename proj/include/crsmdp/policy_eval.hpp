#pragma once

#include "crsmdp/model.hpp"

#include <vector>

namespace crsmdp {

/// Per-epoch risk-sensitive state-action factors. layers[t](s, a) is the
/// expected exponential utility of the discounted cost from epoch t to T-1,
/// given state s and action a at epoch t.
struct QFactors {
    int horizon = 0;
    std::vector<Matrix> layers;
};

/// A value together with a guaranteed error radius: |true - value| <= radius.
struct CertifiedValue {
    double value = 0.0;
    double radius = 0.0;
    int horizon_used = 0;

    double lower() const { return value - radius; }
    double upper() const { return value + radius; }
    bool contains(double x) const { return lower() <= x && x <= upper(); }
};

/// (R_d)_s = sum_a cost(s,a) d(a|s).
Vector expected_cost_vector(const DecisionRule& rule, const Matrix& cost);

/// (P_d)_{s,s'} = sum_a p(s'|s,a) d(a|s).
Matrix transition_matrix(const DecisionRule& rule, const MdpModel& model);

/// Expected discounted cost over epochs 0..T-1, one entry per initial state.
Vector discounted_cost_finite(const MarkovPolicy& policy, const Matrix& cost, int T,
                              const MdpModel& model);

/// Exact infinite-horizon discounted cost of an ultimately stationary policy:
/// a linear solve on the tail followed by a backward pass over the prefix.
Vector discounted_cost_infinite(const MarkovPolicy& policy, const Matrix& cost,
                                const MdpModel& model);

QFactors rs_q_factors(const MarkovPolicy& policy, const Matrix& cost, int T, const MdpModel& model);

/// E[exp(gamma * sum_{t<T} beta^t cost(X_t, A_t))], one entry per initial state.
Vector rs_cost_finite(const MarkovPolicy& policy, const Matrix& cost, int T, const MdpModel& model);

inline constexpr int kDefaultMaxHorizon = 10000;

/// Smallest T whose truncation certificate exp(|g|K(1-b^T)) (K_T - 1) is <= tol.
/// Throws Error("tolerance unreachable") past `max_horizon`.
int rs_certificate_horizon(const CostBounds& bounds, double tol, int max_horizon = kDefaultMaxHorizon);

/// Infinite-horizon risk-sensitive cost as certified intervals, one per state.
/// The value is J_T and the radius J_T (K_T - 1), which is <= tol.
std::vector<CertifiedValue> rs_cost_infinite(const MarkovPolicy& policy, const Matrix& cost,
                                             const MdpModel& model, double tol,
                                             int max_horizon = kDefaultMaxHorizon);

/// Cost bounds covering both the model's own costs and `cost`.
CostBounds bounds_for(const MdpModel& model, const Matrix& cost);

/// Throws Error("risk scale too large") when exp(|gamma| K) is not representable.
void check_risk_scale(const CostBounds& bounds);

}  // namespace crsmdp
