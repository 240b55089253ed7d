#include "crsmdp/oracle.hpp"
#include "crsmdp/policy_eval.hpp"
#include "crsmdp/random_models.hpp"
#include "fixtures.hpp"

#include <doctest.h>

#include <cmath>

using namespace crsmdp;

namespace {

MarkovPolicy always(int m, int n, int a) { return MarkovPolicy::stationary(DecisionRule::deterministic(m, n, a)); }

}  // namespace

TEST_CASE("expected cost vector") {
    const auto model = counterexample_model();
    CHECK(expected_cost_vector(uniform_rule(model), model.constraints[0].cost)(0) == 0.5);
    CHECK(expected_cost_vector(uniform_rule(model), Matrix::Zero(1, 2)).isZero());

    Matrix cost(2, 3);
    cost << 1, 2, 3, 4, 5, 6;
    const auto r = expected_cost_vector(DecisionRule::deterministic(2, 3, 2), cost);
    CHECK(r(0) == 3.0);
    CHECK(r(1) == 6.0);
}

TEST_CASE("policy transition matrix") {
    const auto one = counterexample_model();
    CHECK(transition_matrix(uniform_rule(one), one)(0, 0) == 1.0);

    Rng rng(3);
    const auto model = random_model(rng);
    for (int a = 0; a < 2; ++a)
        CHECK(transition_matrix(DecisionRule::deterministic(2, 2, a), model) == model.transitions[a]);
    const Matrix mixed = transition_matrix(uniform_rule(model), model);
    const Matrix expected = 0.5 * (model.transitions[0] + model.transitions[1]);
    CHECK((mixed - expected).cwiseAbs().maxCoeff() < 1e-15);
}

TEST_CASE("finite-horizon discounted cost") {
    Rng rng(11);
    const auto model = random_model(rng);
    const auto policy = random_policy(rng, 2, 2);
    CHECK(discounted_cost_finite(policy, Matrix::Zero(2, 2), 4, model).isZero());
    for (int s = 0; s < 2; ++s)
        CHECK(std::abs(discounted_cost_finite(policy, model.objective_cost, 3, model)(s) -
                       oracle::enumerate_paths_discounted(policy, model.objective_cost, 3, model, s)) <= 1e-12);
    CHECK_THROWS_AS(discounted_cost_finite(policy, model.objective_cost, 0, model), Error);
}

TEST_CASE("infinite-horizon discounted cost") {
    SUBCASE("counterexample: uniform policy costs 1 under both constraints") {
        const auto model = counterexample_model();
        const auto phi = MarkovPolicy::stationary(uniform_rule(model));
        CHECK(discounted_cost_infinite(phi, model.constraints[0].cost, model)(0) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(discounted_cost_infinite(phi, model.constraints[1].cost, model)(0) == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("constant cost gives c / (1 - beta)") {
        Rng rng(5);
        auto model = random_model(rng, {.num_states = 3, .num_actions = 2});
        const auto v = discounted_cost_infinite(random_policy(rng, 3, 2), Matrix::Constant(3, 2, 0.7), model);
        for (int s = 0; s < 3; ++s) CHECK(v(s) == doctest::Approx(0.7 / (1.0 - model.beta)).epsilon(1e-12));
    }
    SUBCASE("truncation error is at most K beta^T") {
        Rng rng(19);
        for (int trial = 0; trial < 10; ++trial) {
            const auto model = random_model(rng);
            const auto policy = random_policy(rng, 2, 2);
            const auto bounds = cost_bound(model);
            const Vector inf = discounted_cost_infinite(policy, model.objective_cost, model);
            for (int T = 1; T <= 20; ++T) {
                const Vector fin = discounted_cost_finite(policy, model.objective_cost, T, model);
                CHECK((inf - fin).cwiseAbs().maxCoeff() <= bounds.discounted_gap(T) + 1e-12);
            }
        }
    }
}

TEST_CASE("risk-sensitive Q factors") {
    SUBCASE("zero cost gives all-ones layers") {
        const auto model = testing::single_state({0.0, 0.0});
        const auto q = rs_q_factors(always(1, 2, 0), Matrix::Zero(1, 2), 3, model);
        REQUIRE(q.layers.size() == 3);
        for (const auto& layer : q.layers) CHECK(layer.isOnes());
    }
    SUBCASE("single deterministic path") {
        const auto model = testing::single_state({1.0, 0.0});
        const auto q = rs_q_factors(always(1, 2, 0), model.objective_cost, 2, model);
        CHECK(q.layers[1](0, 0) == doctest::Approx(std::exp(0.5)).epsilon(1e-15));
        CHECK(q.layers[1](0, 1) == 1.0);
        CHECK(q.layers[0](0, 0) == doctest::Approx(std::exp(1.5)).epsilon(1e-15));
    }
    SUBCASE("row-combined first layer matches enumeration") {
        Rng rng(23);
        const auto model = random_model(rng);
        const auto policy = random_policy(rng, 2, 2);
        const auto q = rs_q_factors(policy, model.objective_cost, 4, model);
        for (int s = 0; s < 2; ++s) {
            const double combined = policy.at(0).matrix().row(s).dot(q.layers[0].row(s));
            CHECK(std::abs(combined - oracle::enumerate_paths_rs_cost(policy, model.objective_cost, 4, model, s)) <= 1e-10);
        }
    }
}

TEST_CASE("finite-horizon risk-sensitive cost") {
    SUBCASE("zero cost gives ones") {
        Rng rng(2);
        const auto model = random_model(rng);
        CHECK(rs_cost_finite(random_policy(rng, 2, 2), Matrix::Zero(2, 2), 5, model).isOnes());
    }
    SUBCASE("single path with cost 1") {
        const auto model = testing::single_state({1.0, 0.0});
        CHECK(rs_cost_finite(always(1, 2, 0), model.objective_cost, 2, model)(0) ==
              doctest::Approx(4.4816890703380645).epsilon(1e-15));
    }
    SUBCASE("values stay inside the exponential envelope") {
        Rng rng(31);
        for (int trial = 0; trial < 20; ++trial) {
            const auto model = random_model(rng, {.num_states = 3, .num_actions = 2});
            const auto b = cost_bound(model);
            for (int T : {1, 3, 8}) {
                const Vector j = rs_cost_finite(random_policy(rng, 3, 2), model.objective_cost, T, model);
                const double e = b.abs_gamma * b.K * (1.0 - std::pow(b.beta, T));
                CHECK(j.minCoeff() >= std::exp(-e) * (1 - 1e-12));
                CHECK(j.maxCoeff() <= std::exp(e) * (1 + 1e-12));
            }
        }
    }
}

TEST_CASE("certified infinite-horizon risk-sensitive cost") {
    SUBCASE("zero cost is exact at T=1") {
        const auto model = testing::single_state({0.0, 0.0});
        const auto v = rs_cost_infinite(always(1, 2, 0), model.objective_cost, model, 1e-9);
        CHECK(v[0].value == 1.0);
        CHECK(v[0].radius == 0.0);
        CHECK(v[0].horizon_used == 1);
    }
    SUBCASE("always cost 1 converges to e^2") {
        const auto model = testing::single_state({1.0, 0.0});
        const auto v = rs_cost_infinite(always(1, 2, 0), model.objective_cost, model, 1e-9);
        CHECK(v[0].contains(std::exp(2.0)));
        CHECK(v[0].radius <= 1e-9);
    }
    SUBCASE("counterexample uniform policy against a long recursion") {
        const auto model = counterexample_model();
        const auto phi = MarkovPolicy::stationary(uniform_rule(model));
        const auto& c1 = model.constraints[0].cost;
        const double reference = rs_cost_finite(phi, c1, 60, model)(0);
        const auto v = rs_cost_infinite(phi, c1, model, 1e-9);
        CHECK(std::abs(v[0].value - reference) <= v[0].radius + 1e-15);
    }
    SUBCASE("unreachable tolerance") {
        const auto model = testing::single_state({1.0, 0.0});
        CHECK_THROWS_AS(rs_cost_infinite(always(1, 2, 0), model.objective_cost, model, 1e-300, 50), Error);
    }
}

TEST_CASE("risk scale guard") {
    auto model = testing::single_state({1.0, 0.0}, 0.5, 400.0);
    CHECK_THROWS_AS(rs_cost_finite(always(1, 2, 0), model.objective_cost, 2, model), Error);
}
