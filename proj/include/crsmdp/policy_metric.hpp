#pragma once

#include "crsmdp/model.hpp"

#include <optional>

namespace crsmdp {

/// Weight delta of the policy metric, strictly between beta and 1.
class MetricConfig {
public:
    /// Throws Error unless beta < delta < 1.
    MetricConfig(double beta, double delta);
    /// delta = (1 + beta) / 2.
    static MetricConfig midpoint(double beta) { return {beta, 0.5 * (1.0 + beta)}; }

    double delta() const { return delta_; }
    double beta() const { return beta_; }

private:
    double beta_;
    double delta_;
};

/// Induced infinity norm of d - f: the largest absolute row sum. In [0, 2].
double rule_distance(const DecisionRule& d, const DecisionRule& f);

/// sup_t delta^t ||d_t - f_t||. Exact for ultimately stationary policies:
/// past both prefixes the weighted distance only decreases.
double policy_distance(const MarkovPolicy& p1, const MarkovPolicy& p2, const MetricConfig& cfg);

/// Lipschitz constant of the finite-horizon discounted cost in the policy
/// metric; `T == nullopt` gives the infinite-horizon constant K delta/(delta-beta).
double lipschitz_bound_discounted(std::optional<int> T, const CostBounds& bounds,
                                  const MetricConfig& cfg);

/// delta^{-(T-1)} (1-delta)^{-1} exp(|gamma| K (1 - beta^T)).
double lipschitz_bound_rs(int T, const CostBounds& bounds, const MetricConfig& cfg);

}  // namespace crsmdp
