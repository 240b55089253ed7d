#pragma once

#include "crsmdp/model.hpp"
#include "crsmdp/policy_eval.hpp"
#include "crsmdp/simplex.hpp"
#include "crsmdp/truncation.hpp"

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace crsmdp {

/// Base state plus the running exponential accumulators: the objective's and
/// one per risk-sensitive constraint (infinite-horizon ones first, then the
/// finite-horizon ones, each group in model order).
struct AugmentedState {
    int base_state = 0;
    double psi_objective = 1.0;
    std::vector<double> psi_rs;
};

struct AugmentedTransition {
    int target = 0;
    double probability = 0.0;
};

struct ChainOptions {
    std::size_t layer_cap = 200'000;
    /// Relative tolerance under which two accumulator values are merged.
    double merge_tolerance = 1e-12;
};

/// Layered time-expanded state space for epochs 0..T. Layer 0 holds the
/// single state (x, 1, ..., 1).
struct AugmentedChain {
    int horizon = 0;
    int num_actions = 0;
    /// Model constraint index behind each psi_rs component.
    std::vector<int> rs_constraints;
    std::vector<std::vector<AugmentedState>> layers;
    /// transitions[t][z * num_actions + a] lists the layer-(t+1) successors.
    std::vector<std::vector<std::vector<AugmentedTransition>>> transitions;

    const std::vector<AugmentedTransition>& successors(int t, int z, int a) const {
        return transitions[t][static_cast<std::size_t>(z) * num_actions + a];
    }
    std::vector<double> terminal_objective() const;
    std::vector<double> terminal_rs(int component) const;
    std::vector<std::size_t> layer_sizes() const;
};

/// Throws Error("state budget exceeded") when a deduplicated layer passes the cap.
AugmentedChain build_augmented_chain(const MdpModel& model, int T, const ChainOptions& options = {});

/// The occupation-measure LP together with its variable layout:
/// y(t, z, a) lives at layer_offset[t] + z * num_actions + a.
struct OccupationLp {
    LpProblem problem;
    std::vector<std::size_t> layer_offset;
    int num_actions = 0;

    std::size_t variable(int t, int z, int a) const {
        return layer_offset[t] + static_cast<std::size_t>(z) * num_actions + a;
    }
};

/// Objective: expected terminal objective accumulator. Rows: unit initial flow,
/// flow conservation per (t, z), one inequality per model constraint with the
/// right-hand side taken from `bounds`.
OccupationLp build_occupation_lp(const AugmentedChain& chain, const MdpModel& model, BoundMode mode,
                                 const TruncatedBounds& bounds);

/// Marginalizes y over accumulators and normalizes per state; states with
/// (numerically) zero occupation get the uniform distribution.
std::vector<DecisionRule> extract_policy(const AugmentedChain& chain, const OccupationLp& lp,
                                         const LpSolution& solution, int num_states);

struct TailChoice {
    enum class Kind { Uniform, LastRule, Action };
    Kind kind = Kind::Uniform;
    int action = 0;

    /// "uniform", "last", or "action:<index>".
    static TailChoice parse(const std::string& text);
    std::string to_string() const;
};

MarkovPolicy extend_ultimately_stationary(std::vector<DecisionRule> prefix, const TailChoice& tail);

struct SolveOptions {
    TailChoice tail;
    ChainOptions chain;
    SimplexOptions simplex;
    double tol = kDefaultFeasibilityTol;
    std::optional<double> cost_bound_override;
};

struct SolveStats {
    std::vector<std::size_t> layer_sizes;
    int lp_rows = 0;
    int lp_columns = 0;
    long pivots = 0;
    double wall_seconds = 0.0;
};

struct SolveReport {
    BoundMode mode = BoundMode::Lower;
    int horizon = 0;
    LpStatus status = LpStatus::Infeasible;
    /// LP optimum: the finite-horizon risk-sensitive objective at x.
    double optimal_value = 0.0;
    TruncatedBounds bounds;
    double merge_tolerance = 0.0;
    TailChoice tail;

    // Set only when status is Optimal.
    std::optional<MarkovPolicy> policy;
    std::optional<FeasibilityVerdict> feasibility;  // against the original constraints
    std::optional<double> max_violation;            // h of the returned policy
    std::optional<CertifiedValue> certified_objective;
    /// Finite-horizon objective of the extracted policy and its distance to the
    /// LP optimum. A nonzero gap means the Markov marginalization lost value.
    std::optional<double> extracted_value;
    std::optional<double> extraction_gap;

    SolveStats stats;
};

SolveReport solve_crsmdp(const MdpModel& model, int T, BoundMode mode,
                         const SolveOptions& options = {});

}  // namespace crsmdp
