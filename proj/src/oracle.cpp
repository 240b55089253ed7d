#include "crsmdp/oracle.hpp"

#include <cmath>
#include <functional>

namespace crsmdp::oracle {

namespace {

void check_budget(const MdpModel& model, int T) {
    if (T < 1) throw Error("horizon must be >= 1");
    if (std::pow(static_cast<double>(model.num_states) * model.num_actions, T) > kEnumerationBudget)
        throw Error("enumeration budget exceeded");
}

}  // namespace

std::vector<Trajectory> enumerate_trajectories(const MarkovPolicy& policy,
                                               const std::vector<Matrix>& costs, int T,
                                               const MdpModel& model, int start) {
    check_budget(model, T);
    std::vector<Trajectory> out;
    Trajectory current;
    current.states.push_back(start);
    current.probability = 1.0;
    current.discounted_cost.assign(costs.size(), 0.0);

    std::function<void(int)> walk = [&](int t) {
        if (t == T) {
            out.push_back(current);
            return;
        }
        const int s = current.states.back();
        const double discount = std::pow(model.beta, t);
        for (int a = 0; a < model.num_actions; ++a) {
            const double pa = policy.at(t)(s, a);
            if (pa <= 0.0) continue;
            for (int s2 = 0; s2 < model.num_states; ++s2) {
                const double ps = model.p(s, a, s2);
                if (ps <= 0.0) continue;
                const Trajectory saved = current;
                current.actions.push_back(a);
                current.states.push_back(s2);
                current.probability *= pa * ps;
                for (std::size_t k = 0; k < costs.size(); ++k)
                    current.discounted_cost[k] += discount * costs[k](s, a);
                walk(t + 1);
                current = saved;
            }
        }
    };
    walk(0);
    return out;
}

double enumerate_paths_rs_cost(const MarkovPolicy& policy, const Matrix& cost, int T,
                               const MdpModel& model, int start) {
    double total = 0.0;
    for (const auto& tr : enumerate_trajectories(policy, {cost}, T, model, start))
        total += tr.probability * std::exp(model.gamma * tr.discounted_cost[0]);
    return total;
}

double enumerate_paths_rs_cost(const MarkovPolicy& policy, const Matrix& cost, int T,
                               const MdpModel& model) {
    return enumerate_paths_rs_cost(policy, cost, T, model, model.initial_state);
}

double enumerate_paths_discounted(const MarkovPolicy& policy, const Matrix& cost, int T,
                                  const MdpModel& model, int start) {
    double total = 0.0;
    for (const auto& tr : enumerate_trajectories(policy, {cost}, T, model, start))
        total += tr.probability * tr.discounted_cost[0];
    return total;
}

double enumerate_paths_discounted(const MarkovPolicy& policy, const Matrix& cost, int T,
                                  const MdpModel& model) {
    return enumerate_paths_discounted(policy, cost, T, model, model.initial_state);
}

DpResult dp_unconstrained_rs(const MdpModel& model, int T) {
    require_valid(model);
    if (T < 1) throw Error("horizon must be >= 1");
    const double gk = std::abs(model.gamma) * cost_bound(model).K;
    if (gk > 700.0) throw Error("risk scale too large");

    const int m = model.num_states;
    const int n = model.num_actions;
    Vector v = Vector::Ones(m);
    std::vector<DecisionRule> rules(T);
    for (int t = T - 1; t >= 0; --t) {
        const double weight = model.gamma * std::pow(model.beta, t);
        Vector next(m);
        std::vector<int> choice(m, 0);
        for (int s = 0; s < m; ++s) {
            double best = 0.0;
            for (int a = 0; a < n; ++a) {
                double expected = 0.0;
                for (int s2 = 0; s2 < m; ++s2) expected += model.p(s, a, s2) * v(s2);
                const double q = std::exp(weight * model.objective_cost(s, a)) * expected;
                if (a == 0 || q < best) {
                    best = q;
                    choice[s] = a;
                }
            }
            next(s) = best;
        }
        rules[t] = DecisionRule::deterministic(n, choice);
        v = std::move(next);
    }
    return {v(model.initial_state), v, std::move(rules)};
}

GridResult grid_search_constrained(const MdpModel& model, int T, int resolution,
                                   const TruncatedBounds& bounds, double tol) {
    require_valid(model);
    const int m = model.num_states;
    if (m > 2 || model.num_actions != 2 || T < 1 || T > 3 ||
        (resolution != 11 && resolution != 21 && resolution != 41))
        throw Error("instance too large");
    const int slots = m * T;
    if (std::pow(static_cast<double>(resolution), slots) > kGridBudget) throw Error("instance too large");
    if (bounds.constraints.size() != model.constraints.size())
        throw Error("bounds do not match the model's constraints");
    for (const auto& c : bounds.constraints)
        if (c.horizon <= 0 || c.horizon > T)
            throw Error("grid search needs finite effective horizons no longer than T");

    std::vector<Matrix> costs{model.objective_cost};
    for (const auto& c : model.constraints) costs.push_back(c.cost);

    GridResult result;
    std::vector<int> index(slots, 0);
    const double step = 1.0 / (resolution - 1);
    for (;;) {
        std::vector<DecisionRule> rules;
        for (int t = 0; t < T; ++t) {
            Matrix d(m, 2);
            for (int s = 0; s < m; ++s) {
                // index == resolution-1 must give exactly q = 1.
                const int k = index[t * m + s];
                const double q = k == resolution - 1 ? 1.0 : k * step;
                d(s, 0) = q;
                d(s, 1) = 1.0 - q;
            }
            rules.push_back(DecisionRule::from_matrix(std::move(d)));
        }
        MarkovPolicy policy{rules, rules.back()};

        // Each quantity is accumulated over the trajectory prefix that matters.
        const auto paths = enumerate_trajectories(policy, {}, T, model, model.initial_state);
        auto evaluate = [&](const Matrix& cost, int horizon, bool rs) {
            double total = 0.0;
            for (const auto& tr : paths) {
                double dc = 0.0;
                for (int t = 0; t < horizon; ++t)
                    dc += std::pow(model.beta, t) * cost(tr.states[t], tr.actions[t]);
                total += tr.probability * (rs ? std::exp(model.gamma * dc) : dc);
            }
            return total;
        };
        bool feasible = true;
        for (std::size_t i = 0; i < model.constraints.size() && feasible; ++i) {
            const auto& c = model.constraints[i];
            const double v = evaluate(c.cost, bounds.constraints[i].horizon, is_risk_sensitive(c.kind));
            feasible = v <= bounds.constraints[i].bound + tol;
        }
        ++result.evaluated;
        if (feasible) {
            const double value = evaluate(model.objective_cost, T, true);
            if (!result.found || value < result.value) {
                result.found = true;
                result.value = value;
                result.policy = std::move(policy);
            }
        }

        int pos = 0;
        while (pos < slots && ++index[pos] == resolution) index[pos++] = 0;
        if (pos == slots) break;
    }
    return result;
}

}  // namespace crsmdp::oracle
