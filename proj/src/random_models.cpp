#include "crsmdp/random_models.hpp"

namespace crsmdp {

namespace {

Eigen::RowVectorXd random_distribution(Rng& rng, int size, bool sparse) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    Eigen::RowVectorXd row(size);
    for (int i = 0; i < size; ++i) row(i) = (sparse && unit(rng) < 0.3) ? 0.0 : unit(rng) + 1e-3;
    if (row.sum() == 0.0) row(std::uniform_int_distribution<int>(0, size - 1)(rng)) = 1.0;
    row /= row.sum();
    // Push the rounding residue into the largest entry so the row sums to 1.
    Eigen::Index k;
    row.maxCoeff(&k);
    row(k) += 1.0 - row.sum();
    return row;
}

}  // namespace

MdpModel random_model(Rng& rng, const RandomModelSpec& spec) {
    std::uniform_real_distribution<double> beta(spec.beta_min, spec.beta_max);
    std::uniform_real_distribution<double> gamma(-spec.max_abs_gamma, spec.max_abs_gamma);
    std::uniform_real_distribution<double> cost(spec.cost_min, spec.cost_max);
    MdpModel model;
    model.num_states = spec.num_states;
    model.num_actions = spec.num_actions;
    model.beta = beta(rng);
    do {
        model.gamma = gamma(rng);
    } while (std::abs(model.gamma) < 1e-3);
    model.initial_state = std::uniform_int_distribution<int>(0, spec.num_states - 1)(rng);
    model.transitions.assign(spec.num_actions, Matrix::Zero(spec.num_states, spec.num_states));
    for (int a = 0; a < spec.num_actions; ++a)
        for (int s = 0; s < spec.num_states; ++s)
            model.transitions[a].row(s) = random_distribution(rng, spec.num_states, false);
    model.objective_cost = Matrix(spec.num_states, spec.num_actions);
    for (int s = 0; s < spec.num_states; ++s)
        for (int a = 0; a < spec.num_actions; ++a) model.objective_cost(s, a) = cost(rng);
    return model;
}

DecisionRule random_rule(Rng& rng, int num_states, int num_actions, bool sparse) {
    Matrix d(num_states, num_actions);
    for (int s = 0; s < num_states; ++s) d.row(s) = random_distribution(rng, num_actions, sparse);
    return DecisionRule::from_matrix(std::move(d));
}

MarkovPolicy random_policy(Rng& rng, int num_states, int num_actions, int max_prefix) {
    const int len = std::uniform_int_distribution<int>(0, max_prefix)(rng);
    MarkovPolicy policy;
    for (int t = 0; t < len; ++t) policy.prefix.push_back(random_rule(rng, num_states, num_actions, true));
    policy.tail = random_rule(rng, num_states, num_actions, true);
    return policy;
}

}  // namespace crsmdp
