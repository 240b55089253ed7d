#pragma once

#include "crsmdp/model.hpp"

namespace crsmdp::testing {

/// One state, self-loop under every action, given objective cost row.
inline MdpModel single_state(const std::vector<double>& cost, double beta = 0.5, double gamma = 1.0) {
    MdpModel m;
    m.num_states = 1;
    m.num_actions = static_cast<int>(cost.size());
    m.beta = beta;
    m.gamma = gamma;
    m.transitions.assign(m.num_actions, Matrix::Ones(1, 1));
    m.objective_cost = Matrix(1, m.num_actions);
    for (int a = 0; a < m.num_actions; ++a) m.objective_cost(0, a) = cost[a];
    return m;
}

/// Two states, two actions; state 1 absorbing. Action 1 reaches it faster
/// but costs nothing under the first constraint.
inline MdpModel two_state_constrained() {
    MdpModel m;
    m.num_states = 2;
    m.num_actions = 2;
    m.beta = 0.5;
    m.gamma = 0.5;
    Matrix safe(2, 2), risky(2, 2);
    safe << 0.9, 0.1, 0.0, 1.0;
    risky << 0.6, 0.4, 0.0, 1.0;
    m.transitions = {safe, risky};
    m.objective_cost = Matrix(2, 2);
    m.objective_cost << 0.0, 0.0, 1.0, 1.0;
    Matrix c1(2, 2);
    c1 << 1.0, 0.0, 0.0, 0.0;
    m.constraints.push_back({ConstraintKind::DiscountedInfinite, c1, 1.2, std::nullopt});
    m.constraints.push_back({ConstraintKind::RsInfinite, m.objective_cost, 1.6, std::nullopt});
    return m;
}

}  // namespace crsmdp::testing
