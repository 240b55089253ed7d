#include "crsmdp/cli.hpp"
#include "crsmdp/model_io.hpp"

#include <doctest.h>
#include <nlohmann/json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace crsmdp;
using nlohmann::json;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result run(std::vector<std::string> args) {
    args.insert(args.begin(), "crsmdp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string data(const std::string& name) { return std::string(CRSMDP_DATA_DIR) + "/" + name; }

}  // namespace

TEST_CASE("solve on the counterexample") {
    const auto lower = run({"solve", "--model", data("counterexample.json"), "--mode", "lower", "--horizon", "4"});
    CHECK(lower.code == cli::kExitInfeasible);
    CHECK(json::parse(lower.out)["status"] == "infeasible");

    const auto upper = run({"solve", "--model", data("counterexample.json"), "--mode", "upper", "--horizon", "4"});
    CHECK(upper.code == cli::kExitOk);
    const auto doc = json::parse(upper.out);
    CHECK(doc["status"] == "optimal");
    CHECK(doc["feasibility"]["h"].get<double>() <= 0.25 + 1e-12);
}

TEST_CASE("usage errors") {
    CHECK(run({"solve", "--horizon", "3"}).code == cli::kExitError);
    CHECK(run({"solve", "--model", data("counterexample.json")}).code == cli::kExitError);
    CHECK(run({"solve", "--model", data("counterexample.json"), "--horizon", "3", "--mode", "original"}).code ==
          cli::kExitError);
    CHECK(run({"counterexample", "--horizon", "0"}).code == cli::kExitError);
    CHECK(run({"check", "--model", data("counterexample.json"), "--policy", data("uniform_policy.json"), "--epsilon",
               "-1"})
              .code == cli::kExitError);
    CHECK(run({}).code == cli::kExitError);
    CHECK(run({"bogus"}).code == cli::kExitError);
    const auto missing = run({"solve", "--model", "/nonexistent.json", "--horizon", "2"});
    CHECK(missing.code == cli::kExitError);
    CHECK(missing.err.find("cannot open") != std::string::npos);
}

TEST_CASE("eval") {
    const auto r = run({"eval", "--model", data("counterexample.json"), "--policy", data("uniform_policy.json"),
                        "--horizon", "5"});
    REQUIRE(r.code == cli::kExitOk);
    const auto doc = json::parse(r.out);
    const auto& c1 = doc["costs"][1];
    CHECK(c1["name"] == "constraint_0");
    CHECK(std::abs(c1["discounted_infinite"]["value"].get<double>() - 1.0) <= 1e-12);
    const auto& objective = doc["costs"][0];
    CHECK(objective["rs_finite"]["value"].get<double>() == 1.0);
    CHECK(objective["discounted_finite"]["value"].get<double>() == 0.0);
}

TEST_CASE("check") {
    const auto phi = run({"check", "--model", data("counterexample.json"), "--policy", data("uniform_policy.json")});
    CHECK(phi.code == cli::kExitOk);
    CHECK(std::abs(json::parse(phi.out)["h"].get<double>()) <= 1e-12);

    const auto a1 = run({"check", "--model", data("counterexample.json"), "--policy", data("always_a1_policy.json"),
                         "--epsilon", "0.5"});
    CHECK(a1.code == cli::kExitInfeasible);
    CHECK(json::parse(a1.out)["h"].get<double>() == doctest::Approx(1.0).epsilon(1e-12));

    const auto free = run({"check", "--model", data("unconstrained.json"), "--policy", data("uniform_policy_2x2.json")});
    CHECK(free.code == cli::kExitOk);
    CHECK(free.out.find("no constraints") != std::string::npos);
}

TEST_CASE("counterexample command") {
    const auto lower = run({"counterexample", "--pretty"});
    CHECK(lower.code == cli::kExitOk);
    std::size_t rows = 0;
    for (std::size_t pos = 0; (pos = lower.out.find("INFEASIBLE", pos)) != std::string::npos; ++pos) ++rows;
    CHECK(rows == 8);

    const auto upper = run({"counterexample", "--mode", "upper"});
    CHECK(upper.code == cli::kExitOk);
    const auto doc = json::parse(upper.out);
    CHECK(doc["rows"].size() == 8);
    for (const auto& row : doc["rows"]) CHECK(row["status"] == "optimal");
}

TEST_CASE("solve report feeds back into check") {
    const auto out = std::filesystem::temp_directory_path() / "crsmdp_cli_report.json";
    const auto r = run({"solve", "--model", data("two_state.json"), "--mode", "lower", "--horizon", "6", "--out",
                        out.string()});
    REQUIRE(r.code == cli::kExitOk);
    const auto c = run({"check", "--model", data("two_state.json"), "--policy", out.string()});
    CHECK(c.code == cli::kExitOk);
    std::filesystem::remove(out);
}

TEST_CASE("sweep runs every horizon in order") {
    const auto r = run({"solve", "--model", data("counterexample.json"), "--mode", "upper", "--sweep", "2..5"});
    CHECK(r.code == cli::kExitOk);
    const auto doc = json::parse(r.out);
    REQUIRE(doc.size() == 4);
    for (int i = 0; i < 4; ++i) CHECK(doc[i]["horizon"] == i + 2);
}

TEST_CASE("epsilon picks the horizon") {
    const auto r = run({"solve", "--model", data("counterexample.json"), "--mode", "upper", "--epsilon", "0.1"});
    CHECK(r.code == cli::kExitOk);
    CHECK(json::parse(r.out)["horizon"] == 9);
}

TEST_CASE("layer cap from the environment") {
    ::setenv("CRSMDP_LAYER_CAP", "1", 1);
    const auto capped = run({"solve", "--model", data("unconstrained.json"), "--horizon", "3"});
    const auto flag = run({"solve", "--model", data("unconstrained.json"), "--horizon", "3", "--layer-cap", "1000"});
    ::unsetenv("CRSMDP_LAYER_CAP");
    CHECK(capped.code == cli::kExitError);
    CHECK(capped.err.find("state budget exceeded") != std::string::npos);
    CHECK(flag.code == cli::kExitOk);
}

TEST_CASE("selftest") {
    const auto r = run({"selftest", "--seed", "5", "--count", "5"});
    CHECK(r.code == cli::kExitOk);
    CHECK(json::parse(r.out)["pass"] == true);
}
