#pragma once

#include <Eigen/Dense>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace crsmdp {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Tolerance used for row-stochasticity checks throughout the library.
inline constexpr double kStochasticTol = 1e-12;

enum class ConstraintKind { DiscountedInfinite, RsInfinite, DiscountedFinite, RsFinite };

bool is_finite_horizon(ConstraintKind kind);
bool is_risk_sensitive(ConstraintKind kind);
/// File-format spelling: "discounted_inf", "rs_inf", "discounted_fin", "rs_fin".
std::string_view to_string(ConstraintKind kind);
std::optional<ConstraintKind> parse_constraint_kind(std::string_view text);

struct ConstraintSpec {
    ConstraintKind kind = ConstraintKind::DiscountedInfinite;
    Matrix cost;                 // m x n
    double bound = 0.0;
    std::optional<int> horizon;  // present iff kind is finite-horizon
};

/// A constrained risk-sensitive MDP with finite state and action sets.
///
/// transitions[a](s, s') holds p(s'|s,a). All matrices are indexed
/// (state, action) or (state, state).
struct MdpModel {
    int num_states = 0;
    int num_actions = 0;
    std::vector<Matrix> transitions;
    Matrix objective_cost;
    double beta = 0.5;
    double gamma = 1.0;
    int initial_state = 0;
    std::vector<ConstraintSpec> constraints;

    std::vector<std::string> state_names;
    std::vector<std::string> action_names;

    double p(int s, int a, int next) const { return transitions[a](s, next); }
    Eigen::RowVectorXd next_distribution(int s, int a) const { return transitions[a].row(s); }
};

struct Violation {
    std::string location;
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool ok() const { return violations.empty(); }
};

ValidationReport validate_model(const MdpModel& model);

/// Throws Error listing every violation when the model is invalid.
void require_valid(const MdpModel& model);

/// Rescales transition rows whose sums are within kStochasticTol of one.
void renormalize_transitions(MdpModel& model);

/// Uniform absolute cost bound C over the objective and every constraint cost,
/// together with K = C/(1-beta) and the multiplicative truncation factor K_T.
struct CostBounds {
    double C = 0.0;
    double K = 0.0;
    double beta = 0.5;
    double abs_gamma = 1.0;

    /// K_T = exp(|gamma| K beta^T).
    double k_t(int T) const;
    /// K beta^T, the additive truncation gap for discounted costs.
    double discounted_gap(int T) const;
};

/// Tightest uniform bound, or `override_c` when given (must be >= the tightest).
CostBounds cost_bound(const MdpModel& model, std::optional<double> override_c = std::nullopt);

/// Row-stochastic m x n matrix; row s is the action distribution in state s.
class DecisionRule {
public:
    DecisionRule() = default;

    /// Throws Error unless every entry is >= 0 and every row sums to 1 within
    /// kStochasticTol.
    static DecisionRule from_matrix(Matrix matrix);
    static DecisionRule uniform(int num_states, int num_actions);
    static DecisionRule deterministic(int num_states, int num_actions, int action);
    static DecisionRule deterministic(int num_actions, const std::vector<int>& actions);

    const Matrix& matrix() const { return matrix_; }
    double operator()(int s, int a) const { return matrix_(s, a); }
    int num_states() const { return static_cast<int>(matrix_.rows()); }
    int num_actions() const { return static_cast<int>(matrix_.cols()); }

    friend bool operator==(const DecisionRule& lhs, const DecisionRule& rhs) {
        return lhs.matrix_ == rhs.matrix_;
    }

private:
    explicit DecisionRule(Matrix matrix) : matrix_(std::move(matrix)) {}
    Matrix matrix_;
};

/// Empty string when `matrix` is row-stochastic, otherwise a description of
/// the first offending row.
std::string stochasticity_error(const Matrix& matrix);

/// Ultimately stationary Markov randomized policy: the prefix rules are used at
/// epochs 0..prefix.size()-1 and the tail rule at every later epoch.
struct MarkovPolicy {
    std::vector<DecisionRule> prefix;
    DecisionRule tail;

    static MarkovPolicy stationary(DecisionRule rule) { return {{}, std::move(rule)}; }

    const DecisionRule& at(int t) const {
        return t < static_cast<int>(prefix.size()) ? prefix[t] : tail;
    }
    int num_states() const { return tail.num_states(); }
    int num_actions() const { return tail.num_actions(); }
};

DecisionRule uniform_rule(const MdpModel& model);

/// Single-state, two-action model whose two discounted constraints sum to a
/// policy-independent total. Every truncated-from-below problem built from it
/// is infeasible although the uniform stationary policy is feasible.
MdpModel counterexample_model(double gamma = 1.0);

}  // namespace crsmdp
