#include "crsmdp/augmented_lp.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

namespace crsmdp {

std::vector<double> AugmentedChain::terminal_objective() const {
    std::vector<double> out;
    for (const auto& z : layers.back()) out.push_back(z.psi_objective);
    return out;
}

std::vector<double> AugmentedChain::terminal_rs(int component) const {
    std::vector<double> out;
    for (const auto& z : layers.back()) out.push_back(z.psi_rs.at(component));
    return out;
}

std::vector<std::size_t> AugmentedChain::layer_sizes() const {
    std::vector<std::size_t> out;
    for (const auto& layer : layers) out.push_back(layer.size());
    return out;
}

namespace {

bool close(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

double component(const AugmentedState& z, int level) {
    if (level == 0) return z.base_state;
    if (level == 1) return z.psi_objective;
    return z.psi_rs[level - 2];
}

// Splits `idx` into groups of states that agree on every component, sorting
// by one component at a time and cutting wherever neighbours are not close.
void cluster(const std::vector<AugmentedState>& cand, std::vector<std::size_t>::iterator first,
             std::vector<std::size_t>::iterator last, int level, int levels, double tol,
             std::vector<std::vector<std::size_t>>& groups) {
    if (level == levels) {
        groups.emplace_back(first, last);
        return;
    }
    std::stable_sort(first, last, [&](std::size_t a, std::size_t b) {
        return component(cand[a], level) < component(cand[b], level);
    });
    auto run = first;
    for (auto it = first + 1; it <= last; ++it) {
        const bool split = it == last || (level == 0
                                              ? cand[*it].base_state != cand[*(it - 1)].base_state
                                              : !close(component(cand[*it], level),
                                                       component(cand[*(it - 1)], level), tol));
        if (split) {
            cluster(cand, run, it, level + 1, levels, tol, groups);
            run = it;
        }
    }
}

}  // namespace

AugmentedChain build_augmented_chain(const MdpModel& model, int T, const ChainOptions& options) {
    require_valid(model);
    if (T < 1) throw Error("horizon must be >= 1");

    AugmentedChain chain;
    chain.horizon = T;
    chain.num_actions = model.num_actions;

    // Infinite-horizon risk-sensitive constraints first, then finite ones.
    std::vector<int> freeze_at;  // epoch from which the accumulator stops growing
    for (int pass = 0; pass < 2; ++pass) {
        for (int i = 0; i < static_cast<int>(model.constraints.size()); ++i) {
            const auto& c = model.constraints[i];
            if (pass == 0 && c.kind == ConstraintKind::RsInfinite) {
                chain.rs_constraints.push_back(i);
                freeze_at.push_back(T);
            } else if (pass == 1 && c.kind == ConstraintKind::RsFinite) {
                if (*c.horizon > T) throw Error("horizon below finite-constraint horizon");
                chain.rs_constraints.push_back(i);
                freeze_at.push_back(*c.horizon);
            }
        }
    }
    const int num_rs = static_cast<int>(chain.rs_constraints.size());
    const int levels = 2 + num_rs;

    chain.layers.push_back({AugmentedState{model.initial_state, 1.0, std::vector<double>(num_rs, 1.0)}});

    for (int t = 0; t < T; ++t) {
        const auto& layer = chain.layers[t];
        const double weight = model.gamma * std::pow(model.beta, t);

        struct Origin {
            std::size_t slot;  // z * n + a
            double probability;
        };
        std::vector<AugmentedState> cand;
        std::vector<Origin> origin;
        for (std::size_t z = 0; z < layer.size(); ++z) {
            const int s = layer[z].base_state;
            for (int a = 0; a < model.num_actions; ++a) {
                AugmentedState next;
                next.psi_objective = layer[z].psi_objective * std::exp(weight * model.objective_cost(s, a));
                next.psi_rs = layer[z].psi_rs;
                for (int k = 0; k < num_rs; ++k) {
                    if (t < freeze_at[k]) {
                        const auto& cost = model.constraints[chain.rs_constraints[k]].cost;
                        next.psi_rs[k] *= std::exp(weight * cost(s, a));
                    }
                }
                for (int s2 = 0; s2 < model.num_states; ++s2) {
                    const double p = model.p(s, a, s2);
                    if (p <= 0.0) continue;
                    next.base_state = s2;
                    cand.push_back(next);
                    origin.push_back({z * model.num_actions + a, p});
                }
            }
        }

        std::vector<std::size_t> order(cand.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::vector<std::vector<std::size_t>> groups;
        if (!order.empty())
            cluster(cand, order.begin(), order.end(), 0, levels, options.merge_tolerance, groups);
        if (groups.size() > options.layer_cap)
            throw Error("state budget exceeded: layer " + std::to_string(t + 1) + " has " +
                        std::to_string(groups.size()) + " augmented states (cap " +
                        std::to_string(options.layer_cap) + ")");

        std::vector<AugmentedState> next_layer;
        next_layer.reserve(groups.size());
        std::vector<std::vector<AugmentedTransition>> trans(layer.size() * model.num_actions);
        for (std::size_t g = 0; g < groups.size(); ++g) {
            // Representative: the earliest-generated member, for stable output.
            const std::size_t rep = *std::min_element(groups[g].begin(), groups[g].end());
            next_layer.push_back(cand[rep]);
            for (std::size_t member : groups[g]) {
                auto& out = trans[origin[member].slot];
                auto it = std::find_if(out.begin(), out.end(), [&](const AugmentedTransition& tr) {
                    return tr.target == static_cast<int>(g);
                });
                if (it == out.end()) out.push_back({static_cast<int>(g), origin[member].probability});
                else it->probability += origin[member].probability;
            }
        }
        for (auto& out : trans)
            std::sort(out.begin(), out.end(),
                      [](const auto& a, const auto& b) { return a.target < b.target; });
        chain.layers.push_back(std::move(next_layer));
        chain.transitions.push_back(std::move(trans));
    }
    return chain;
}

OccupationLp build_occupation_lp(const AugmentedChain& chain, const MdpModel& model, BoundMode mode,
                                 const TruncatedBounds& bounds) {
    if (mode == BoundMode::Original) throw Error("the occupation LP needs a truncated mode");
    if (bounds.mode != mode || bounds.horizon != chain.horizon)
        throw Error("truncated bounds do not match the requested mode and horizon");
    if (bounds.constraints.size() != model.constraints.size())
        throw Error("bounds do not match the model's constraints");

    const int T = chain.horizon;
    const int n = chain.num_actions;
    OccupationLp out;
    out.num_actions = n;
    std::size_t vars = 0;
    std::size_t flow_rows = 0;
    for (int t = 0; t < T; ++t) {
        out.layer_offset.push_back(vars);
        vars += chain.layers[t].size() * n;
        flow_rows += chain.layers[t].size();
    }

    LpProblem& lp = out.problem;
    lp.objective = Vector::Zero(static_cast<Eigen::Index>(vars));
    lp.eq_matrix = Matrix::Zero(static_cast<Eigen::Index>(flow_rows), static_cast<Eigen::Index>(vars));
    lp.eq_rhs = Vector::Zero(static_cast<Eigen::Index>(flow_rows));
    const auto num_con = static_cast<Eigen::Index>(model.constraints.size());
    lp.ineq_matrix = Matrix::Zero(num_con, static_cast<Eigen::Index>(vars));
    lp.ineq_rhs = Vector::Zero(num_con);

    lp.variable_names.resize(vars);
    for (int t = 0; t < T; ++t)
        for (std::size_t z = 0; z < chain.layers[t].size(); ++z)
            for (int a = 0; a < n; ++a)
                lp.variable_names[out.variable(t, static_cast<int>(z), a)] =
                    "y_" + std::to_string(t) + "_" + std::to_string(z) + "_" + std::to_string(a);

    // Flow rows: row index of (t, z) is the running count of earlier layers.
    std::vector<std::size_t> row_offset(T, 0);
    for (int t = 1; t < T; ++t) row_offset[t] = row_offset[t - 1] + chain.layers[t - 1].size();
    for (int t = 0; t < T; ++t) {
        for (std::size_t z = 0; z < chain.layers[t].size(); ++z) {
            const auto row = static_cast<Eigen::Index>(row_offset[t] + z);
            lp.eq_names.push_back("flow_" + std::to_string(t) + "_" + std::to_string(z));
            for (int a = 0; a < n; ++a)
                lp.eq_matrix(row, static_cast<Eigen::Index>(out.variable(t, static_cast<int>(z), a))) = 1.0;
        }
    }
    lp.eq_rhs(0) = 1.0;
    for (int t = 0; t + 1 < T; ++t) {
        for (std::size_t z = 0; z < chain.layers[t].size(); ++z) {
            for (int a = 0; a < n; ++a) {
                const auto col = static_cast<Eigen::Index>(out.variable(t, static_cast<int>(z), a));
                for (const auto& tr : chain.successors(t, static_cast<int>(z), a))
                    lp.eq_matrix(static_cast<Eigen::Index>(row_offset[t + 1] + tr.target), col) -=
                        tr.probability;
            }
        }
    }

    // Terminal expectations of each accumulator, attached to epoch T-1.
    const int last = T - 1;
    const auto terminal_obj = chain.terminal_objective();
    std::vector<std::vector<double>> terminal_rs;
    for (std::size_t k = 0; k < chain.rs_constraints.size(); ++k)
        terminal_rs.push_back(chain.terminal_rs(static_cast<int>(k)));
    auto expected_terminal = [&](const std::vector<double>& values, int z, int a) {
        double sum = 0.0;
        for (const auto& tr : chain.successors(last, z, a)) sum += tr.probability * values[tr.target];
        return sum;
    };
    for (std::size_t z = 0; z < chain.layers[last].size(); ++z)
        for (int a = 0; a < n; ++a)
            lp.objective(static_cast<Eigen::Index>(out.variable(last, static_cast<int>(z), a))) =
                expected_terminal(terminal_obj, static_cast<int>(z), a);

    for (Eigen::Index i = 0; i < num_con; ++i) {
        const auto& c = model.constraints[i];
        lp.ineq_rhs(i) = bounds.constraints[i].bound;
        lp.ineq_names.push_back("con_" + std::to_string(i) + "_" + std::string(to_string(c.kind)));
        if (is_risk_sensitive(c.kind)) {
            const auto k = std::find(chain.rs_constraints.begin(), chain.rs_constraints.end(), i) -
                           chain.rs_constraints.begin();
            for (std::size_t z = 0; z < chain.layers[last].size(); ++z)
                for (int a = 0; a < n; ++a)
                    lp.ineq_matrix(i, static_cast<Eigen::Index>(out.variable(last, static_cast<int>(z), a))) =
                        expected_terminal(terminal_rs[k], static_cast<int>(z), a);
        } else {
            const int horizon = bounds.constraints[i].horizon;
            for (int t = 0; t < std::min(horizon, T); ++t) {
                const double w = std::pow(model.beta, t);
                for (std::size_t z = 0; z < chain.layers[t].size(); ++z) {
                    const int s = chain.layers[t][z].base_state;
                    for (int a = 0; a < n; ++a)
                        lp.ineq_matrix(i, static_cast<Eigen::Index>(out.variable(t, static_cast<int>(z), a))) =
                            w * c.cost(s, a);
                }
            }
        }
    }
    return out;
}

std::vector<DecisionRule> extract_policy(const AugmentedChain& chain, const OccupationLp& lp,
                                         const LpSolution& solution, int num_states) {
    if (solution.status != LpStatus::Optimal) throw Error("policy extraction needs an optimal LP solution");
    const int n = chain.num_actions;
    std::vector<DecisionRule> rules;
    for (int t = 0; t < chain.horizon; ++t) {
        Matrix mass = Matrix::Zero(num_states, n);
        for (std::size_t z = 0; z < chain.layers[t].size(); ++z) {
            const int s = chain.layers[t][z].base_state;
            for (int a = 0; a < n; ++a)
                mass(s, a) += std::max(0.0, solution.y(static_cast<Eigen::Index>(lp.variable(t, static_cast<int>(z), a))));
        }
        for (int s = 0; s < num_states; ++s) {
            const double total = mass.row(s).sum();
            if (total <= 1e-12) mass.row(s).setConstant(1.0 / n);
            else mass.row(s) /= total;
        }
        rules.push_back(DecisionRule::from_matrix(std::move(mass)));
    }
    return rules;
}

TailChoice TailChoice::parse(const std::string& text) {
    if (text == "uniform") return {Kind::Uniform, 0};
    if (text == "last") return {Kind::LastRule, 0};
    const std::string prefix = "action:";
    if (text.rfind(prefix, 0) == 0) {
        try {
            std::size_t used = 0;
            const int a = std::stoi(text.substr(prefix.size()), &used);
            if (used == text.size() - prefix.size() && a >= 0) return {Kind::Action, a};
        } catch (const std::exception&) {
        }
    }
    throw Error("tail choice must be 'uniform', 'last' or 'action:<index>'");
}

std::string TailChoice::to_string() const {
    switch (kind) {
        case Kind::Uniform: return "uniform";
        case Kind::LastRule: return "last";
        case Kind::Action: return "action:" + std::to_string(action);
    }
    return "uniform";
}

MarkovPolicy extend_ultimately_stationary(std::vector<DecisionRule> prefix, const TailChoice& tail) {
    if (prefix.empty()) throw Error("cannot extend an empty prefix");
    const int m = prefix.front().num_states();
    const int n = prefix.front().num_actions();
    MarkovPolicy policy;
    switch (tail.kind) {
        case TailChoice::Kind::Uniform: policy.tail = DecisionRule::uniform(m, n); break;
        case TailChoice::Kind::LastRule: policy.tail = prefix.back(); break;
        case TailChoice::Kind::Action:
            if (tail.action >= n) throw Error("tail action index out of range");
            policy.tail = DecisionRule::deterministic(m, n, tail.action);
            break;
    }
    policy.prefix = std::move(prefix);
    return policy;
}

SolveReport solve_crsmdp(const MdpModel& model, int T, BoundMode mode, const SolveOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    require_valid(model);
    if (mode == BoundMode::Original) throw Error("solve needs mode lower or upper");

    SolveReport report;
    report.mode = mode;
    report.horizon = T;
    report.merge_tolerance = options.chain.merge_tolerance;
    report.tail = options.tail;

    const CostBounds cb = cost_bound(model, options.cost_bound_override);
    report.bounds = truncation_bounds(model, T, mode, cb);
    const auto chain = build_augmented_chain(model, T, options.chain);
    const auto lp = build_occupation_lp(chain, model, mode, report.bounds);
    const auto solution = solve_lp(lp.problem, options.simplex);

    report.status = solution.status;
    report.stats.layer_sizes = chain.layer_sizes();
    report.stats.lp_rows = static_cast<int>(lp.problem.eq_rhs.size() + lp.problem.ineq_rhs.size());
    report.stats.lp_columns = lp.problem.num_variables();
    report.stats.pivots = solution.pivots;

    if (solution.status == LpStatus::Optimal) {
        report.optimal_value = solution.objective_value;
        auto policy = extend_ultimately_stationary(
            extract_policy(chain, lp, solution, model.num_states), options.tail);
        const int x = model.initial_state;
        report.extracted_value = rs_cost_finite(policy, model.objective_cost, T, model)(x);
        report.extraction_gap = std::abs(*report.extracted_value - report.optimal_value);
        report.feasibility = check_feasibility(policy, model, std::nullopt, BoundMode::Original, options.tol);
        report.max_violation = max_violation(policy, model, options.tol);
        report.certified_objective = rs_cost_infinite(policy, model.objective_cost, model, options.tol)[x];
        report.policy = std::move(policy);
    }
    report.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

}  // namespace crsmdp
