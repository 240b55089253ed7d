#include "crsmdp/model.hpp"

#include <cmath>
#include <sstream>

namespace crsmdp {

bool is_finite_horizon(ConstraintKind kind) {
    return kind == ConstraintKind::DiscountedFinite || kind == ConstraintKind::RsFinite;
}

bool is_risk_sensitive(ConstraintKind kind) {
    return kind == ConstraintKind::RsInfinite || kind == ConstraintKind::RsFinite;
}

std::string_view to_string(ConstraintKind kind) {
    switch (kind) {
        case ConstraintKind::DiscountedInfinite: return "discounted_inf";
        case ConstraintKind::RsInfinite: return "rs_inf";
        case ConstraintKind::DiscountedFinite: return "discounted_fin";
        case ConstraintKind::RsFinite: return "rs_fin";
    }
    return "unknown";
}

std::optional<ConstraintKind> parse_constraint_kind(std::string_view text) {
    for (auto kind : {ConstraintKind::DiscountedInfinite, ConstraintKind::RsInfinite,
                      ConstraintKind::DiscountedFinite, ConstraintKind::RsFinite}) {
        if (to_string(kind) == text) return kind;
    }
    return std::nullopt;
}

namespace {

void check_cost(const Matrix& cost, int m, int n, const std::string& where,
                std::vector<Violation>& out) {
    if (cost.rows() != m || cost.cols() != n) {
        std::ostringstream msg;
        msg << "cost matrix is " << cost.rows() << "x" << cost.cols() << ", expected " << m << "x"
            << n;
        out.push_back({where, msg.str()});
        return;
    }
    if (!cost.allFinite()) out.push_back({where, "cost matrix has non-finite entries"});
}

}  // namespace

ValidationReport validate_model(const MdpModel& model) {
    ValidationReport report;
    auto& out = report.violations;
    const int m = model.num_states;
    const int n = model.num_actions;

    if (m <= 0) out.push_back({"num_states", "number of states must be positive"});
    if (n <= 0) out.push_back({"num_actions", "number of actions must be positive"});
    if (!(model.beta > 0.0 && model.beta < 1.0))
        out.push_back({"beta", "discount factor must lie strictly inside (0,1)"});
    if (model.gamma == 0.0 || !std::isfinite(model.gamma))
        out.push_back({"gamma", "risk factor must be nonzero"});
    if (m <= 0 || n <= 0) return report;

    if (model.initial_state < 0 || model.initial_state >= m)
        out.push_back({"initial_state", "initial state index out of range"});

    if (static_cast<int>(model.transitions.size()) != n) {
        out.push_back({"transitions", "expected one transition matrix per action"});
    } else {
        for (int a = 0; a < n; ++a) {
            const Matrix& P = model.transitions[a];
            if (P.rows() != m || P.cols() != m) {
                out.push_back({"transitions[a=" + std::to_string(a) + "]",
                               "transition matrix must be m x m"});
                continue;
            }
            for (int s = 0; s < m; ++s) {
                const std::string where =
                    "transitions(s=" + std::to_string(s) + ",a=" + std::to_string(a) + ")";
                const auto row = P.row(s);
                if (!row.allFinite() || (row.array() < 0.0).any()) {
                    out.push_back({where, "transition probabilities must be finite and >= 0"});
                    continue;
                }
                const double sum = row.sum();
                if (std::abs(sum - 1.0) > kStochasticTol) {
                    std::ostringstream msg;
                    msg.precision(17);
                    msg << "transition row sums to " << sum << ", expected 1";
                    out.push_back({where, msg.str()});
                }
            }
        }
    }

    check_cost(model.objective_cost, m, n, "objective_cost", out);
    for (std::size_t i = 0; i < model.constraints.size(); ++i) {
        const auto& c = model.constraints[i];
        const std::string where = "constraints[" + std::to_string(i) + "]";
        check_cost(c.cost, m, n, where, out);
        if (!std::isfinite(c.bound)) out.push_back({where, "bound must be finite"});
        if (is_finite_horizon(c.kind)) {
            if (!c.horizon) out.push_back({where, "finite-horizon constraint needs a horizon"});
            else if (*c.horizon <= 0) out.push_back({where, "horizon must be positive"});
        } else if (c.horizon) {
            out.push_back({where, "infinite-horizon constraint must not carry a horizon"});
        }
        if (c.kind == ConstraintKind::RsInfinite && !(c.bound > 0.0))
            out.push_back({where, "risk-sensitive bound must be positive"});
    }
    return report;
}

void require_valid(const MdpModel& model) {
    const auto report = validate_model(model);
    if (report.ok()) return;
    std::ostringstream msg;
    msg << "invalid model:";
    for (const auto& v : report.violations) msg << "\n  " << v.location << ": " << v.message;
    throw Error(msg.str());
}

void renormalize_transitions(MdpModel& model) {
    for (auto& P : model.transitions) {
        for (Eigen::Index s = 0; s < P.rows(); ++s) {
            const double sum = P.row(s).sum();
            if (sum > 0.0 && std::abs(sum - 1.0) <= kStochasticTol) P.row(s) /= sum;
        }
    }
}

double CostBounds::k_t(int T) const { return std::exp(abs_gamma * K * std::pow(beta, T)); }

double CostBounds::discounted_gap(int T) const { return K * std::pow(beta, T); }

CostBounds cost_bound(const MdpModel& model, std::optional<double> override_c) {
    double c = model.objective_cost.size() ? model.objective_cost.cwiseAbs().maxCoeff() : 0.0;
    for (const auto& con : model.constraints)
        if (con.cost.size()) c = std::max(c, con.cost.cwiseAbs().maxCoeff());
    if (override_c) {
        if (*override_c < c)
            throw Error("cost bound override is smaller than the largest absolute cost");
        c = *override_c;
    }
    CostBounds b;
    b.C = c;
    b.K = c / (1.0 - model.beta);
    b.beta = model.beta;
    b.abs_gamma = std::abs(model.gamma);
    return b;
}

std::string stochasticity_error(const Matrix& matrix) {
    for (Eigen::Index s = 0; s < matrix.rows(); ++s) {
        const auto row = matrix.row(s);
        if (!row.allFinite() || (row.array() < 0.0).any())
            return "row " + std::to_string(s) + " has negative or non-finite entries";
        if (std::abs(row.sum() - 1.0) > kStochasticTol) {
            std::ostringstream msg;
            msg.precision(17);
            msg << "row " << s << " sums to " << row.sum();
            return msg.str();
        }
    }
    return {};
}

DecisionRule DecisionRule::from_matrix(Matrix matrix) {
    if (matrix.rows() == 0 || matrix.cols() == 0) throw Error("decision rule must be non-empty");
    if (auto err = stochasticity_error(matrix); !err.empty())
        throw Error("decision rule is not row-stochastic: " + err);
    return DecisionRule(std::move(matrix));
}

DecisionRule DecisionRule::uniform(int num_states, int num_actions) {
    return DecisionRule(Matrix::Constant(num_states, num_actions, 1.0 / num_actions));
}

DecisionRule DecisionRule::deterministic(int num_states, int num_actions, int action) {
    return deterministic(num_actions, std::vector<int>(num_states, action));
}

DecisionRule DecisionRule::deterministic(int num_actions, const std::vector<int>& actions) {
    Matrix d = Matrix::Zero(static_cast<Eigen::Index>(actions.size()), num_actions);
    for (std::size_t s = 0; s < actions.size(); ++s) {
        if (actions[s] < 0 || actions[s] >= num_actions) throw Error("action index out of range");
        d(static_cast<Eigen::Index>(s), actions[s]) = 1.0;
    }
    return DecisionRule(std::move(d));
}

DecisionRule uniform_rule(const MdpModel& model) {
    return DecisionRule::uniform(model.num_states, model.num_actions);
}

MdpModel counterexample_model(double gamma) {
    MdpModel model;
    model.num_states = 1;
    model.num_actions = 2;
    model.transitions = {Matrix::Ones(1, 1), Matrix::Ones(1, 1)};
    model.objective_cost = Matrix::Zero(1, 2);
    model.beta = 0.5;
    model.gamma = gamma;
    model.initial_state = 0;
    model.state_names = {"s"};
    model.action_names = {"a1", "a2"};

    Matrix c1(1, 2);
    c1 << 1.0, 0.0;
    Matrix c2 = Matrix::Ones(1, 2) - c1;
    model.constraints.push_back({ConstraintKind::DiscountedInfinite, c1, 1.0, std::nullopt});
    model.constraints.push_back({ConstraintKind::DiscountedInfinite, c2, 1.0, std::nullopt});
    return model;
}

}  // namespace crsmdp
