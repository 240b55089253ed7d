#include "crsmdp/truncation.hpp"

#include <algorithm>
#include <cmath>

namespace crsmdp {

std::string_view to_string(BoundMode mode) {
    switch (mode) {
        case BoundMode::Lower: return "lower";
        case BoundMode::Upper: return "upper";
        case BoundMode::Original: return "original";
    }
    return "unknown";
}

std::optional<BoundMode> parse_bound_mode(std::string_view text) {
    for (auto mode : {BoundMode::Lower, BoundMode::Upper, BoundMode::Original})
        if (to_string(mode) == text) return mode;
    return std::nullopt;
}

TruncatedBounds truncation_bounds(const MdpModel& model, std::optional<int> T, BoundMode mode) {
    return truncation_bounds(model, T, mode, cost_bound(model));
}

TruncatedBounds truncation_bounds(const MdpModel& model, std::optional<int> T, BoundMode mode,
                                  const CostBounds& bounds) {
    TruncatedBounds out;
    out.mode = mode;
    if (mode == BoundMode::Original) {
        for (const auto& c : model.constraints)
            out.constraints.push_back({c.bound, c.horizon.value_or(0)});
        return out;
    }
    if (!T) throw Error("truncated bounds need a horizon");
    if (*T < 1) throw Error("horizon must be >= 1");
    for (const auto& c : model.constraints)
        if (c.horizon && *T < *c.horizon) throw Error("horizon below finite-constraint horizon");

    out.horizon = *T;
    const double gap = bounds.discounted_gap(*T);
    const double factor = bounds.k_t(*T);
    const bool lower = mode == BoundMode::Lower;
    for (const auto& c : model.constraints) {
        switch (c.kind) {
            case ConstraintKind::DiscountedInfinite:
                out.constraints.push_back({lower ? c.bound - gap : c.bound + gap, *T});
                break;
            case ConstraintKind::RsInfinite:
                out.constraints.push_back({lower ? c.bound / factor : c.bound * factor, *T});
                break;
            case ConstraintKind::DiscountedFinite:
            case ConstraintKind::RsFinite:
                out.constraints.push_back({c.bound, *c.horizon});
                break;
        }
    }
    return out;
}

std::vector<ConstraintValue> constraint_values(const MarkovPolicy& policy, const MdpModel& model,
                                               const TruncatedBounds& bounds, double tol) {
    if (bounds.constraints.size() != model.constraints.size())
        throw Error("bounds do not match the model's constraints");
    const int x = model.initial_state;
    std::vector<ConstraintValue> out;
    for (std::size_t i = 0; i < model.constraints.size(); ++i) {
        const auto& c = model.constraints[i];
        const int horizon = bounds.constraints[i].horizon;
        if (is_risk_sensitive(c.kind)) {
            if (horizon > 0) {
                out.push_back({rs_cost_finite(policy, c.cost, horizon, model)(x), 0.0});
            } else {
                const auto cv = rs_cost_infinite(policy, c.cost, model, tol / 10.0)[x];
                out.push_back({cv.value, cv.radius});
            }
        } else {
            const Vector v = horizon > 0 ? discounted_cost_finite(policy, c.cost, horizon, model)
                                         : discounted_cost_infinite(policy, c.cost, model);
            out.push_back({v(x), 0.0});
        }
    }
    return out;
}

FeasibilityVerdict check_feasibility(const MarkovPolicy& policy, const MdpModel& model,
                                     const TruncatedBounds& bounds, double tol) {
    const auto values = constraint_values(policy, model, bounds, tol);
    FeasibilityVerdict verdict;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double slack = bounds.constraints[i].bound - (values[i].value + values[i].radius);
        verdict.slack.push_back(slack);
        verdict.max_violation = std::max(verdict.max_violation, 0.0 - slack);
    }
    verdict.feasible = verdict.max_violation <= tol;
    return verdict;
}

FeasibilityVerdict check_feasibility(const MarkovPolicy& policy, const MdpModel& model,
                                     std::optional<int> T, BoundMode mode, double tol) {
    if (mode == BoundMode::Original) T.reset();
    return check_feasibility(policy, model, truncation_bounds(model, T, mode), tol);
}

double max_violation(const MarkovPolicy& policy, const MdpModel& model, double tol) {
    const auto bounds = truncation_bounds(model, std::nullopt, BoundMode::Original);
    const auto values = constraint_values(policy, model, bounds, tol);
    double h = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < values.size(); ++i)
        h = std::max(h, values[i].value - bounds.constraints[i].bound);
    return h;
}

bool is_eps_feasible(const MarkovPolicy& policy, const MdpModel& model, double eps, double tol) {
    if (!(eps > 0.0)) throw Error("epsilon must be positive");
    return max_violation(policy, model, tol) <= eps;
}

int horizon_for_epsilon(const MdpModel& model, double eps, int max_horizon) {
    return horizon_for_epsilon(cost_bound(model), eps, max_horizon);
}

int horizon_for_epsilon(const CostBounds& bounds, double eps, int max_horizon) {
    if (!(eps > 0.0)) throw Error("epsilon must be positive");
    const double gk = bounds.abs_gamma * bounds.K;
    const double envelope = std::exp(gk);
    for (int T = 1; T <= max_horizon; ++T) {
        const double bt = std::pow(bounds.beta, T);
        if (bounds.K * bt <= eps / 2.0 && envelope * std::expm1(gk * bt) <= eps / 2.0) return T;
    }
    throw Error("cap exceeded: no horizon up to " + std::to_string(max_horizon) +
                " meets epsilon");
}

}  // namespace crsmdp
