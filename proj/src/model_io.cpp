#include "crsmdp/model_io.hpp"

#include <algorithm>
#include <fstream>

namespace crsmdp {

using nlohmann::json;

nlohmann::json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

json matrix_to_json(const Matrix& matrix) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < matrix.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < matrix.cols(); ++j) row.push_back(matrix(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

Matrix matrix_from_json(const json& rows, const char* what) {
    if (!rows.is_array() || rows.empty() || !rows[0].is_array())
        throw Error(std::string(what) + ": expected a non-empty 2-D array");
    const auto cols = rows[0].size();
    Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (!rows[i].is_array() || rows[i].size() != cols)
            throw Error(std::string(what) + ": ragged rows");
        for (std::size_t j = 0; j < cols; ++j) {
            if (!rows[i][j].is_number()) throw Error(std::string(what) + ": non-numeric entry");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                rows[i][j].get<double>();
        }
    }
    return out;
}

namespace {

std::vector<std::string> names(const json& doc, const char* key) {
    if (!doc.contains(key) || !doc[key].is_array() || doc[key].empty())
        throw Error(std::string("model: '") + key + "' must be a non-empty array of names");
    std::vector<std::string> out;
    for (const auto& item : doc[key]) out.push_back(item.is_string() ? item.get<std::string>() : item.dump());
    return out;
}

const json& field(const json& doc, const char* key) {
    if (!doc.contains(key)) throw Error(std::string("model: missing field '") + key + "'");
    return doc[key];
}

}  // namespace

MdpModel model_from_json(const json& doc, const LoadOptions& options) {
    if (!doc.is_object()) throw Error("model: expected a JSON object");
    MdpModel model;
    model.state_names = names(doc, "states");
    model.action_names = names(doc, "actions");
    model.num_states = static_cast<int>(model.state_names.size());
    model.num_actions = static_cast<int>(model.action_names.size());
    const int m = model.num_states;
    const int n = model.num_actions;

    const json& tr = field(doc, "transitions");
    if (!tr.is_array() || static_cast<int>(tr.size()) != m)
        throw Error("model: 'transitions' must have one entry per state");
    model.transitions.assign(n, Matrix::Zero(m, m));
    for (int s = 0; s < m; ++s) {
        if (!tr[s].is_array() || static_cast<int>(tr[s].size()) != n)
            throw Error("model: transitions[" + std::to_string(s) + "] must have one row per action");
        for (int a = 0; a < n; ++a) {
            const json& row = tr[s][a];
            if (!row.is_array() || static_cast<int>(row.size()) != m)
                throw Error("model: transitions[" + std::to_string(s) + "][" + std::to_string(a) +
                            "] must have one probability per state");
            for (int j = 0; j < m; ++j) {
                if (!row[j].is_number()) throw Error("model: non-numeric transition probability");
                model.transitions[a](s, j) = row[j].get<double>();
            }
        }
    }

    model.beta = field(doc, "beta").get<double>();
    model.gamma = field(doc, "gamma").get<double>();

    const json& init = field(doc, "initial_state");
    if (init.is_string()) {
        const auto name = init.get<std::string>();
        auto it = std::find(model.state_names.begin(), model.state_names.end(), name);
        if (it == model.state_names.end()) throw Error("model: unknown initial state '" + name + "'");
        model.initial_state = static_cast<int>(it - model.state_names.begin());
    } else if (init.is_number_integer()) {
        model.initial_state = init.get<int>();
    } else {
        throw Error("model: 'initial_state' must be a state name or index");
    }

    model.objective_cost = matrix_from_json(field(doc, "objective_cost"), "objective_cost");

    if (doc.contains("constraints")) {
        const json& cons = doc["constraints"];
        if (!cons.is_array()) throw Error("model: 'constraints' must be an array");
        for (const auto& c : cons) {
            ConstraintSpec spec;
            const auto kind_text = field(c, "kind").get<std::string>();
            auto kind = parse_constraint_kind(kind_text);
            if (!kind) throw Error("model: unknown constraint kind '" + kind_text + "'");
            spec.kind = *kind;
            spec.cost = matrix_from_json(field(c, "cost"), "constraint cost");
            spec.bound = field(c, "bound").get<double>();
            if (c.contains("horizon") && !c["horizon"].is_null()) spec.horizon = c["horizon"].get<int>();
            model.constraints.push_back(std::move(spec));
        }
    }

    if (options.renormalize) renormalize_transitions(model);
    require_valid(model);
    return model;
}

MdpModel load_model(const std::filesystem::path& path, const LoadOptions& options) {
    try {
        return model_from_json(read_json_file(path), options);
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

json model_to_json(const MdpModel& model) {
    json doc;
    auto names_or_default = [](const std::vector<std::string>& given, int count, char prefix) {
        json out = json::array();
        for (int i = 0; i < count; ++i)
            out.push_back(i < static_cast<int>(given.size()) ? given[i]
                                                             : std::string(1, prefix) + std::to_string(i));
        return out;
    };
    doc["states"] = names_or_default(model.state_names, model.num_states, 's');
    doc["actions"] = names_or_default(model.action_names, model.num_actions, 'a');
    json tr = json::array();
    for (int s = 0; s < model.num_states; ++s) {
        json per_action = json::array();
        for (int a = 0; a < model.num_actions; ++a) {
            json row = json::array();
            for (int j = 0; j < model.num_states; ++j) row.push_back(model.p(s, a, j));
            per_action.push_back(std::move(row));
        }
        tr.push_back(std::move(per_action));
    }
    doc["transitions"] = std::move(tr);
    doc["beta"] = model.beta;
    doc["gamma"] = model.gamma;
    doc["initial_state"] = model.initial_state;
    doc["objective_cost"] = matrix_to_json(model.objective_cost);
    json cons = json::array();
    for (const auto& c : model.constraints) {
        json item;
        item["kind"] = std::string(to_string(c.kind));
        item["cost"] = matrix_to_json(c.cost);
        item["bound"] = c.bound;
        if (c.horizon) item["horizon"] = *c.horizon;
        cons.push_back(std::move(item));
    }
    doc["constraints"] = std::move(cons);
    return doc;
}

json policy_to_json(const MarkovPolicy& policy) {
    json rules = json::array();
    for (const auto& d : policy.prefix) rules.push_back(matrix_to_json(d.matrix()));
    return {{"rules", std::move(rules)}, {"tail", matrix_to_json(policy.tail.matrix())}};
}

MarkovPolicy policy_from_json(const json& doc) {
    if (doc.contains("policy")) return policy_from_json(doc["policy"]);
    if (!doc.is_object() || !doc.contains("tail"))
        throw Error("policy: expected an object with 'rules' and 'tail'");
    MarkovPolicy policy;
    policy.tail = DecisionRule::from_matrix(matrix_from_json(doc["tail"], "policy tail"));
    if (doc.contains("rules")) {
        for (const auto& r : doc["rules"]) {
            auto rule = DecisionRule::from_matrix(matrix_from_json(r, "policy rule"));
            if (rule.num_states() != policy.tail.num_states() ||
                rule.num_actions() != policy.tail.num_actions())
                throw Error("policy: rule dimensions differ from the tail");
            policy.prefix.push_back(std::move(rule));
        }
    }
    return policy;
}

MarkovPolicy load_policy(const std::filesystem::path& path) {
    try {
        return policy_from_json(read_json_file(path));
    } catch (const json::exception& e) {
        throw Error(path.string() + ": " + e.what());
    }
}

}  // namespace crsmdp
