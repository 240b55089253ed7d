#include "crsmdp/cli.hpp"

#include "crsmdp/augmented_lp.hpp"
#include "crsmdp/model_io.hpp"
#include "crsmdp/oracle.hpp"
#include "crsmdp/policy_eval.hpp"
#include "crsmdp/policy_metric.hpp"
#include "crsmdp/random_models.hpp"
#include "crsmdp/report.hpp"
#include "crsmdp/truncation.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <future>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>

namespace crsmdp::cli {

using nlohmann::json;

namespace {

/// Raised for flag combinations that are rejected before any computation.
class UsageError : public Error {
public:
    using Error::Error;
};

struct CliConfig {
    std::string command;
    std::string model_path;
    std::string policy_path;
    std::optional<int> horizon;
    std::string mode = "lower";
    std::optional<double> epsilon;
    double tol = kDefaultFeasibilityTol;
    std::optional<double> delta;
    std::optional<std::size_t> layer_cap;
    double merge_tol = 1e-12;
    std::string tail = "uniform";
    std::string out_path;
    std::uint64_t seed = 1;
    int count = 20;
    bool pretty = false;
    std::string sweep;
    std::optional<double> cost_bound;
    bool no_renormalize = false;
    std::string dump_lp;
};

std::string fmt(double x) {
    std::ostringstream s;
    s << std::setprecision(17) << x;
    return s.str();
}

BoundMode require_truncated_mode(const std::string& text) {
    auto mode = parse_bound_mode(text);
    if (!mode || *mode == BoundMode::Original) throw UsageError("--mode must be 'lower' or 'upper'");
    return *mode;
}

MdpModel load(const CliConfig& cfg) {
    if (cfg.model_path.empty()) throw UsageError("--model is required");
    return load_model(cfg.model_path, {.renormalize = !cfg.no_renormalize});
}

MarkovPolicy load_policy_for(const CliConfig& cfg, const MdpModel& model) {
    if (cfg.policy_path.empty()) throw UsageError("--policy is required");
    auto policy = load_policy(cfg.policy_path);
    if (policy.num_states() != model.num_states || policy.num_actions() != model.num_actions)
        throw Error("policy dimensions do not match the model");
    return policy;
}

void emit(const CliConfig& cfg, const json& doc, const std::string& table, std::ostream& out) {
    const std::string text = cfg.pretty ? table : doc.dump(2) + "\n";
    if (cfg.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(cfg.out_path);
    if (!file) throw Error("cannot write " + cfg.out_path);
    file << doc.dump(2) << "\n";
    if (cfg.pretty) out << table;
}

SolveOptions solve_options(const CliConfig& cfg) {
    SolveOptions opt;
    opt.tail = TailChoice::parse(cfg.tail);
    opt.tol = cfg.tol;
    opt.cost_bound_override = cfg.cost_bound;
    opt.chain.merge_tolerance = cfg.merge_tol;
    if (const char* env = std::getenv("CRSMDP_LAYER_CAP")) {
        try {
            opt.chain.layer_cap = std::stoull(env);
        } catch (const std::exception&) {
            throw UsageError("CRSMDP_LAYER_CAP must be a positive integer");
        }
    }
    if (cfg.layer_cap) opt.chain.layer_cap = *cfg.layer_cap;
    return opt;
}

std::string report_table(const SolveReport& r) {
    std::ostringstream s;
    s << "mode " << to_string(r.mode) << "  horizon " << r.horizon << "  status "
      << to_string(r.status) << "\n";
    if (r.status == LpStatus::Optimal) {
        s << "value " << fmt(r.optimal_value) << "\n";
        if (r.certified_objective)
            s << "certified objective " << fmt(r.certified_objective->value) << " +/- "
              << fmt(r.certified_objective->radius) << "\n";
        if (r.feasibility) {
            s << "original constraints: " << (r.feasibility->feasible ? "feasible" : "violated") << "\n";
            for (std::size_t i = 0; i < r.feasibility->slack.size(); ++i)
                s << "  slack[" << i << "] " << fmt(r.feasibility->slack[i]) << "\n";
        }
        if (r.extraction_gap) s << "extraction gap " << fmt(*r.extraction_gap) << "\n";
    }
    return s.str();
}

std::pair<int, int> parse_sweep(const std::string& text) {
    const auto dots = text.find("..");
    if (dots == std::string::npos) throw UsageError("--sweep expects T1..T2");
    try {
        const int lo = std::stoi(text.substr(0, dots));
        const int hi = std::stoi(text.substr(dots + 2));
        if (lo < 1 || hi < lo) throw UsageError("--sweep expects 1 <= T1 <= T2");
        return {lo, hi};
    } catch (const std::invalid_argument&) {
        throw UsageError("--sweep expects T1..T2");
    }
}

int exit_for(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return kExitOk;
        case LpStatus::Infeasible: return kExitInfeasible;
        case LpStatus::Unbounded: return kExitError;
    }
    return kExitError;
}

int cmd_solve(const CliConfig& cfg, std::ostream& out) {
    const BoundMode mode = require_truncated_mode(cfg.mode);
    if (cfg.horizon && cfg.sweep.size()) throw UsageError("--horizon and --sweep are exclusive");
    if (cfg.epsilon && !(*cfg.epsilon > 0.0)) throw UsageError("--epsilon must be positive");
    const SolveOptions opt = solve_options(cfg);
    const MdpModel model = load(cfg);

    if (!cfg.sweep.empty()) {
        const auto [lo, hi] = parse_sweep(cfg.sweep);
        std::vector<std::future<SolveReport>> jobs;
        for (int T = lo; T <= hi; ++T)
            jobs.push_back(std::async(std::launch::async,
                                      [&model, &opt, mode, T] { return solve_crsmdp(model, T, mode, opt); }));
        json all = json::array();
        std::string table;
        int code = kExitOk;
        for (auto& job : jobs) {
            const auto report = job.get();
            all.push_back(report_to_json(report));
            table += report_table(report);
            code = std::max(code, exit_for(report.status) == kExitError ? kExitError : exit_for(report.status));
        }
        emit(cfg, all, table, out);
        return code;
    }

    int T = 0;
    if (cfg.horizon) T = *cfg.horizon;
    else if (cfg.epsilon) T = horizon_for_epsilon(cost_bound(model, cfg.cost_bound), *cfg.epsilon);
    else throw UsageError("solve needs --horizon, --epsilon or --sweep");
    if (T < 1) throw UsageError("--horizon must be >= 1");

    if (!cfg.dump_lp.empty()) {
        const auto chain = build_augmented_chain(model, T, opt.chain);
        const auto bounds = truncation_bounds(model, T, mode, cost_bound(model, cfg.cost_bound));
        std::ofstream dump(cfg.dump_lp);
        if (!dump) throw Error("cannot write " + cfg.dump_lp);
        write_lp_text(dump, build_occupation_lp(chain, model, mode, bounds).problem);
    }

    const auto report = solve_crsmdp(model, T, mode, opt);
    json doc = report_to_json(report);
    if (cfg.epsilon) doc["epsilon"] = *cfg.epsilon;
    emit(cfg, doc, report_table(report), out);
    return exit_for(report.status);
}

json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

int cmd_eval(const CliConfig& cfg, std::ostream& out) {
    if (!cfg.horizon) throw UsageError("eval needs --horizon");
    if (*cfg.horizon < 1) throw UsageError("--horizon must be >= 1");
    const MdpModel model = load(cfg);
    const MarkovPolicy policy = load_policy_for(cfg, model);
    const int T = *cfg.horizon;
    const int x = model.initial_state;

    std::vector<std::pair<std::string, const Matrix*>> costs{{"objective", &model.objective_cost}};
    for (std::size_t i = 0; i < model.constraints.size(); ++i)
        costs.emplace_back("constraint_" + std::to_string(i), &model.constraints[i].cost);

    json doc;
    doc["horizon"] = T;
    doc["initial_state"] = x;
    json entries = json::array();
    std::ostringstream table;
    table << std::left << std::setw(16) << "cost" << std::setw(26) << "discounted_T"
          << std::setw(26) << "discounted_inf" << std::setw(26) << "rs_T"
          << "rs_inf (+/- radius)\n";
    for (const auto& [name, cost] : costs) {
        const Vector lt = discounted_cost_finite(policy, *cost, T, model);
        const Vector li = discounted_cost_infinite(policy, *cost, model);
        const Vector jt = rs_cost_finite(policy, *cost, T, model);
        const auto ji = rs_cost_infinite(policy, *cost, model, cfg.tol);
        json rs_inf = json::array();
        for (const auto& cv : ji) rs_inf.push_back(certified_to_json(cv));
        entries.push_back({{"name", name},
                           {"discounted_finite", {{"value", lt(x)}, {"vector", vector_json(lt)}}},
                           {"discounted_infinite", {{"value", li(x)}, {"vector", vector_json(li)}}},
                           {"rs_finite", {{"value", jt(x)}, {"vector", vector_json(jt)}}},
                           {"rs_infinite", {{"value", ji[x].value}, {"radius", ji[x].radius}, {"vector", rs_inf}}}});
        table << std::setw(16) << name << std::setw(26) << fmt(lt(x)) << std::setw(26) << fmt(li(x))
              << std::setw(26) << fmt(jt(x)) << fmt(ji[x].value) << " +/- " << fmt(ji[x].radius) << "\n";
    }
    doc["costs"] = std::move(entries);
    emit(cfg, doc, table.str(), out);
    return kExitOk;
}

int cmd_check(const CliConfig& cfg, std::ostream& out) {
    const double eps = cfg.epsilon.value_or(0.0);
    if (!(eps >= 0.0)) throw UsageError("--epsilon must be >= 0");
    const MdpModel model = load(cfg);
    const MarkovPolicy policy = load_policy_for(cfg, model);

    if (model.constraints.empty()) {
        json doc = {{"constraints", 0}, {"message", "no constraints"}, {"feasible", true}};
        emit(cfg, doc, "no constraints\n", out);
        return kExitOk;
    }
    const auto verdict = check_feasibility(policy, model, std::nullopt, BoundMode::Original, cfg.tol);
    const double h = max_violation(policy, model, cfg.tol);
    const bool eps_ok = eps > 0.0 ? is_eps_feasible(policy, model, eps, cfg.tol) : verdict.feasible;

    json doc = verdict_to_json(verdict);
    json values = json::array();
    const auto original = truncation_bounds(model, std::nullopt, BoundMode::Original);
    for (const auto& cv : constraint_values(policy, model, original, cfg.tol))
        values.push_back({{"value", cv.value}, {"radius", cv.radius}});
    doc["values"] = std::move(values);
    doc["h"] = h;
    doc["epsilon"] = eps;
    doc["epsilon_feasible"] = eps_ok;
    std::ostringstream table;
    table << "feasible " << (verdict.feasible ? "yes" : "no") << "\nh " << fmt(h) << "\n";
    for (std::size_t i = 0; i < verdict.slack.size(); ++i)
        table << "slack[" << i << "] " << fmt(verdict.slack[i]) << "\n";
    table << "epsilon-feasible (eps=" << fmt(eps) << ") " << (eps_ok ? "yes" : "no") << "\n";
    emit(cfg, doc, table.str(), out);
    return verdict.feasible || eps_ok ? kExitOk : kExitInfeasible;
}

int cmd_counterexample(const CliConfig& cfg, std::ostream& out) {
    const BoundMode mode = require_truncated_mode(cfg.mode);
    const int max_t = cfg.horizon.value_or(8);
    if (max_t < 1) throw UsageError("--horizon must be >= 1");
    const MdpModel model = counterexample_model();
    const SolveOptions opt = solve_options(cfg);
    const LpStatus expected = mode == BoundMode::Lower ? LpStatus::Infeasible : LpStatus::Optimal;

    bool reproduced = true;
    json rows = json::array();
    std::ostringstream table;
    table << "T   P_T status\n";
    for (int T = 1; T <= max_t; ++T) {
        const auto report = solve_crsmdp(model, T, mode, opt);
        reproduced = reproduced && report.status == expected;
        rows.push_back({{"horizon", T},
                        {"status", std::string(to_string(report.status))},
                        {"value", report.status == LpStatus::Optimal ? json(report.optimal_value) : json(nullptr)}});
        std::string status(to_string(report.status));
        for (auto& ch : status) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
        table << std::left << std::setw(4) << T << status << "\n";
    }

    const auto phi = MarkovPolicy::stationary(uniform_rule(model));
    const Vector l1 = discounted_cost_infinite(phi, model.constraints[0].cost, model);
    const Vector l2 = discounted_cost_infinite(phi, model.constraints[1].cost, model);
    const auto verdict = check_feasibility(phi, model, std::nullopt, BoundMode::Original, cfg.tol);
    const double h = max_violation(phi, model, cfg.tol);
    reproduced = reproduced && verdict.feasible && std::abs(h) <= 1e-12;

    table << "uniform policy: L(C1) " << fmt(l1(0)) << "  L(C2) " << fmt(l2(0)) << "  slacks ("
          << fmt(verdict.slack[0]) << ", " << fmt(verdict.slack[1]) << ")  h " << fmt(h) << "\n"
          << (reproduced ? "reproduced" : "NOT reproduced") << "\n";
    json doc = {{"mode", std::string(to_string(mode))},
                {"rows", rows},
                {"uniform_policy",
                 {{"L_C1", l1(0)}, {"L_C2", l2(0)}, {"feasibility", verdict_to_json(verdict)}, {"h", h}}},
                {"reproduced", reproduced}};
    emit(cfg, doc, table.str(), out);
    return reproduced ? kExitOk : kExitInfeasible;
}

int cmd_selftest(const CliConfig& cfg, std::ostream& out) {
    if (cfg.count < 1) throw UsageError("--count must be >= 1");
    Rng rng(cfg.seed);
    std::uniform_int_distribution<int> dim(1, 2);
    double worst_eval = 0.0;
    double worst_lp = 0.0;
    int lipschitz_failures = 0;
    for (int k = 0; k < cfg.count; ++k) {
        RandomModelSpec spec;
        spec.num_states = dim(rng);
        spec.num_actions = dim(rng);
        const MdpModel model = random_model(rng, spec);
        const int T = 3;
        const auto p1 = random_policy(rng, spec.num_states, spec.num_actions);
        const auto p2 = random_policy(rng, spec.num_states, spec.num_actions);
        const double j = rs_cost_finite(p1, model.objective_cost, T, model)(model.initial_state);
        const double l = discounted_cost_finite(p1, model.objective_cost, T, model)(model.initial_state);
        worst_eval = std::max({worst_eval,
                               std::abs(j - oracle::enumerate_paths_rs_cost(p1, model.objective_cost, T, model)),
                               std::abs(l - oracle::enumerate_paths_discounted(p1, model.objective_cost, T, model))});

        const auto report = solve_crsmdp(model, T, BoundMode::Lower);
        const auto dp = oracle::dp_unconstrained_rs(model, T);
        worst_lp = std::max(worst_lp, std::abs(report.optimal_value - dp.value) / dp.value);

        const MetricConfig metric = cfg.delta ? MetricConfig(model.beta, *cfg.delta)
                                              : MetricConfig::midpoint(model.beta);
        const double mu = policy_distance(p1, p2, metric);
        const double diff = (rs_cost_finite(p1, model.objective_cost, T, model) -
                             rs_cost_finite(p2, model.objective_cost, T, model))
                                .cwiseAbs()
                                .maxCoeff();
        if (diff > lipschitz_bound_rs(T, cost_bound(model), metric) * mu + 1e-12) ++lipschitz_failures;
    }
    const bool pass = worst_eval <= 1e-10 && worst_lp <= 1e-8 && lipschitz_failures == 0;
    json doc = {{"seed", cfg.seed},
                {"models", cfg.count},
                {"max_eval_error", worst_eval},
                {"max_lp_relative_error", worst_lp},
                {"lipschitz_failures", lipschitz_failures},
                {"pass", pass}};
    std::ostringstream table;
    table << "evaluation vs enumeration  max error " << fmt(worst_eval) << "\n"
          << "LP vs dynamic programming  max rel error " << fmt(worst_lp) << "\n"
          << "Lipschitz violations       " << lipschitz_failures << "\n"
          << (pass ? "PASS" : "FAIL") << "\n";
    emit(cfg, doc, table.str(), out);
    return pass ? kExitOk : kExitError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CliConfig cfg;
    CLI::App app{"Constrained risk-sensitive MDP solver"};
    app.require_subcommand(1);

    auto add_common = [&cfg](CLI::App* sub) {
        sub->add_option("--tol", cfg.tol, "Feasibility tolerance")->check(CLI::PositiveNumber);
        sub->add_option("--out", cfg.out_path, "Write JSON output to this path");
        sub->add_flag("--pretty", cfg.pretty, "Print a human-readable table");
    };
    auto add_model = [&cfg](CLI::App* sub) {
        sub->add_option("--model", cfg.model_path, "Model JSON file");
        sub->add_flag("--no-renormalize", cfg.no_renormalize,
                      "Do not rescale nearly-stochastic transition rows");
        sub->add_option("--cost-bound", cfg.cost_bound, "Override the uniform cost bound C");
    };

    auto* solve = app.add_subcommand("solve", "Solve a truncated problem via the occupation LP");
    add_model(solve);
    add_common(solve);
    solve->add_option("--mode", cfg.mode, "lower | upper");
    solve->add_option("--horizon", cfg.horizon, "Truncation horizon T");
    solve->add_option("--epsilon", cfg.epsilon, "Pick T so Upper solutions are epsilon-feasible");
    solve->add_option("--sweep", cfg.sweep, "Solve T1..T2 concurrently");
    solve->add_option("--layer-cap", cfg.layer_cap, "Maximum augmented states per layer");
    solve->add_option("--merge-tol", cfg.merge_tol, "Relative accumulator merge tolerance");
    solve->add_option("--tail", cfg.tail, "uniform | last | action:<k>");
    solve->add_option("--dump-lp", cfg.dump_lp, "Write the LP in plain text");

    auto* eval = app.add_subcommand("eval", "Evaluate a policy under every cost");
    add_model(eval);
    add_common(eval);
    eval->add_option("--policy", cfg.policy_path, "Policy JSON file");
    eval->add_option("--horizon", cfg.horizon, "Finite horizon T");

    auto* check = app.add_subcommand("check", "Check feasibility of a policy");
    add_model(check);
    add_common(check);
    check->add_option("--policy", cfg.policy_path, "Policy JSON file");
    check->add_option("--epsilon", cfg.epsilon, "Allowed violation");

    auto* counter = app.add_subcommand("counterexample", "Run the single-state counterexample");
    add_common(counter);
    counter->add_option("--mode", cfg.mode, "lower | upper");
    counter->add_option("--horizon", cfg.horizon, "Largest horizon to solve (default 8)");

    auto* selftest = app.add_subcommand("selftest", "Cross-check solvers on random models");
    add_common(selftest);
    selftest->add_option("--seed", cfg.seed, "Random seed");
    selftest->add_option("--count", cfg.count, "Number of random models");
    selftest->add_option("--delta", cfg.delta, "Metric weight in (beta, 1)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n" << app.help();
        return kExitError;
    }

    try {
        if (*solve) return cmd_solve(cfg, out);
        if (*eval) return cmd_eval(cfg, out);
        if (*check) return cmd_check(cfg, out);
        if (*counter) return cmd_counterexample(cfg, out);
        if (*selftest) return cmd_selftest(cfg, out);
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitError;
    }
    return kExitError;
}

}  // namespace crsmdp::cli
