#include "crsmdp/policy_metric.hpp"

#include <algorithm>
#include <cmath>

namespace crsmdp {

MetricConfig::MetricConfig(double beta, double delta) : beta_(beta), delta_(delta) {
    if (!(delta > beta && delta < 1.0))
        throw Error("metric weight delta must lie strictly between beta and 1");
}

double rule_distance(const DecisionRule& d, const DecisionRule& f) {
    if (d.num_states() != f.num_states() || d.num_actions() != f.num_actions())
        throw Error("decision rule dimensions differ");
    return (d.matrix() - f.matrix()).cwiseAbs().rowwise().sum().maxCoeff();
}

double policy_distance(const MarkovPolicy& p1, const MarkovPolicy& p2, const MetricConfig& cfg) {
    if (p1.num_states() != p2.num_states() || p1.num_actions() != p2.num_actions())
        throw Error("policy dimensions differ");
    const int last = static_cast<int>(std::max(p1.prefix.size(), p2.prefix.size()));
    double sup = 0.0;
    double weight = 1.0;
    for (int t = 0; t <= last; ++t, weight *= cfg.delta())
        sup = std::max(sup, weight * rule_distance(p1.at(t), p2.at(t)));
    return sup;
}

double lipschitz_bound_discounted(std::optional<int> T, const CostBounds& bounds,
                                  const MetricConfig& cfg) {
    const double delta = cfg.delta();
    const double beta = bounds.beta;
    if (!T) return bounds.K * delta / (delta - beta);
    if (*T < 1) throw Error("horizon must be >= 1");
    return bounds.K * (std::pow(delta, *T) - std::pow(beta, *T)) /
           (std::pow(delta, *T - 1) * (delta - beta));
}

double lipschitz_bound_rs(int T, const CostBounds& bounds, const MetricConfig& cfg) {
    if (T < 1) throw Error("horizon must be >= 1");
    const double delta = cfg.delta();
    return std::pow(delta, -(T - 1)) / (1.0 - delta) *
           std::exp(bounds.abs_gamma * bounds.K * (1.0 - std::pow(bounds.beta, T)));
}

}  // namespace crsmdp
