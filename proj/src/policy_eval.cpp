#include "crsmdp/policy_eval.hpp"

#include <cmath>
#include <limits>

namespace crsmdp {

namespace {

// exp(700) is close to the largest finite double exponent that leaves room
// for the products formed in the backward recursion.
constexpr double kMaxExponent = 700.0;

void require_dims(const MarkovPolicy& policy, const Matrix& cost, const MdpModel& model) {
    if (policy.num_states() != model.num_states || policy.num_actions() != model.num_actions)
        throw Error("policy dimensions do not match the model");
    if (cost.rows() != model.num_states || cost.cols() != model.num_actions)
        throw Error("cost matrix dimensions do not match the model");
}

}  // namespace

Vector expected_cost_vector(const DecisionRule& rule, const Matrix& cost) {
    return cost.cwiseProduct(rule.matrix()).rowwise().sum();
}

Matrix transition_matrix(const DecisionRule& rule, const MdpModel& model) {
    Matrix P = Matrix::Zero(model.num_states, model.num_states);
    for (int a = 0; a < model.num_actions; ++a)
        P += rule.matrix().col(a).asDiagonal() * model.transitions[a];
    return P;
}

Vector discounted_cost_finite(const MarkovPolicy& policy, const Matrix& cost, int T,
                              const MdpModel& model) {
    if (T < 1) throw Error("horizon must be >= 1");
    require_dims(policy, cost, model);
    // Backward: v_t = R_{d_t} + beta P_{d_t} v_{t+1}, v_T = 0.
    Vector v = Vector::Zero(model.num_states);
    for (int t = T - 1; t >= 0; --t) {
        const auto& d = policy.at(t);
        v = expected_cost_vector(d, cost) + model.beta * transition_matrix(d, model) * v;
    }
    return v;
}

Vector discounted_cost_infinite(const MarkovPolicy& policy, const Matrix& cost,
                                const MdpModel& model) {
    require_dims(policy, cost, model);
    const int m = model.num_states;
    const Matrix A = Matrix::Identity(m, m) - model.beta * transition_matrix(policy.tail, model);
    const Vector r = expected_cost_vector(policy.tail, cost);
    Vector v = A.partialPivLu().solve(r);
    const double residual = (A * v - r).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-9))
        throw Error("internal error: tail linear solve residual " + std::to_string(residual));
    for (int t = static_cast<int>(policy.prefix.size()) - 1; t >= 0; --t) {
        const auto& d = policy.prefix[t];
        v = expected_cost_vector(d, cost) + model.beta * transition_matrix(d, model) * v;
    }
    return v;
}

CostBounds bounds_for(const MdpModel& model, const Matrix& cost) {
    CostBounds b = cost_bound(model);
    if (cost.size() && cost.cwiseAbs().maxCoeff() > b.C) {
        b.C = cost.cwiseAbs().maxCoeff();
        b.K = b.C / (1.0 - model.beta);
    }
    return b;
}

void check_risk_scale(const CostBounds& bounds) {
    if (bounds.abs_gamma * bounds.K > kMaxExponent) throw Error("risk scale too large");
}

QFactors rs_q_factors(const MarkovPolicy& policy, const Matrix& cost, int T, const MdpModel& model) {
    if (T < 1) throw Error("horizon must be >= 1");
    require_dims(policy, cost, model);
    check_risk_scale(bounds_for(model, cost));

    const int m = model.num_states;
    const int n = model.num_actions;
    QFactors q;
    q.horizon = T;
    q.layers.resize(T);
    q.layers[T - 1] = (model.gamma * std::pow(model.beta, T - 1) * cost).array().exp().matrix();
    for (int t = T - 1; t >= 1; --t) {
        // w(s') = sum_a' d_t(a'|s') Q_t(s',a')
        const Vector w = policy.at(t).matrix().cwiseProduct(q.layers[t]).rowwise().sum();
        const double scale = model.gamma * std::pow(model.beta, t - 1);
        Matrix prev(m, n);
        for (int a = 0; a < n; ++a) {
            const Vector expected = model.transitions[a] * w;
            for (int s = 0; s < m; ++s) prev(s, a) = std::exp(scale * cost(s, a)) * expected(s);
        }
        q.layers[t - 1] = std::move(prev);
    }
    return q;
}

Vector rs_cost_finite(const MarkovPolicy& policy, const Matrix& cost, int T, const MdpModel& model) {
    const auto q = rs_q_factors(policy, cost, T, model);
    return policy.at(0).matrix().cwiseProduct(q.layers[0]).rowwise().sum();
}

int rs_certificate_horizon(const CostBounds& bounds, double tol, int max_horizon) {
    if (!(tol > 0.0)) throw Error("tolerance must be positive");
    const double gk = bounds.abs_gamma * bounds.K;
    for (int T = 1; T <= max_horizon; ++T) {
        const double bt = std::pow(bounds.beta, T);
        if (std::exp(gk * (1.0 - bt)) * std::expm1(gk * bt) <= tol) return T;
    }
    throw Error("tolerance unreachable within horizon " + std::to_string(max_horizon));
}

std::vector<CertifiedValue> rs_cost_infinite(const MarkovPolicy& policy, const Matrix& cost,
                                             const MdpModel& model, double tol, int max_horizon) {
    const CostBounds bounds = bounds_for(model, cost);
    check_risk_scale(bounds);
    const int T = rs_certificate_horizon(bounds, tol, max_horizon);
    const Vector j = rs_cost_finite(policy, cost, T, model);
    const double factor = std::expm1(bounds.abs_gamma * bounds.K * std::pow(bounds.beta, T));
    std::vector<CertifiedValue> out;
    out.reserve(j.size());
    // Widened by a few ulps so rounding in J_T cannot push the true value out.
    const double slack = factor > 0.0 ? 16.0 * std::numeric_limits<double>::epsilon() : 0.0;
    for (Eigen::Index s = 0; s < j.size(); ++s) out.push_back({j(s), j(s) * (factor + slack), T});
    return out;
}

}  // namespace crsmdp
