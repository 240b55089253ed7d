#include "crsmdp/policy_eval.hpp"
#include "crsmdp/policy_metric.hpp"
#include "crsmdp/random_models.hpp"

#include <doctest.h>

#include <cmath>

using namespace crsmdp;

TEST_CASE("rule distance") {
    const auto a1 = DecisionRule::deterministic(3, 2, 0);
    const auto a2 = DecisionRule::deterministic(3, 2, 1);
    CHECK(rule_distance(a1, a1) == 0.0);
    CHECK(rule_distance(a1, a2) == 2.0);
    CHECK(rule_distance(DecisionRule::uniform(3, 2), a1) == 1.0);
    CHECK_THROWS_AS(rule_distance(a1, DecisionRule::uniform(2, 2)), Error);
}

TEST_CASE("policy distance") {
    const MetricConfig cfg(0.5, 0.75);
    const auto a1 = DecisionRule::deterministic(1, 2, 0);
    const auto a2 = DecisionRule::deterministic(1, 2, 1);

    const MarkovPolicy p{{a1, a1, a1, a1}, a1};
    CHECK(policy_distance(p, p, cfg) == 0.0);

    const MarkovPolicy q{{a1, a1, a1, a2}, a1};
    CHECK(policy_distance(p, q, cfg) == doctest::Approx(0.84375).epsilon(1e-15));

    CHECK(policy_distance(MarkovPolicy::stationary(a1), MarkovPolicy::stationary(DecisionRule::uniform(1, 2)), cfg) == 1.0);
}

TEST_CASE("metric weight must lie strictly between beta and 1") {
    CHECK_THROWS_AS(MetricConfig(0.5, 0.5), Error);
    CHECK_THROWS_AS(MetricConfig(0.5, 1.0), Error);
    CHECK(MetricConfig::midpoint(0.5).delta() == 0.75);
}

TEST_CASE("metric axioms on random policies") {
    Rng rng(41);
    const MetricConfig cfg(0.4, 0.7);
    for (int trial = 0; trial < 100; ++trial) {
        const auto p = random_policy(rng, 3, 2);
        const auto q = random_policy(rng, 3, 2);
        const auto r = random_policy(rng, 3, 2);
        CHECK(policy_distance(p, p, cfg) == 0.0);
        CHECK(policy_distance(p, q, cfg) == policy_distance(q, p, cfg));
        CHECK(policy_distance(p, r, cfg) <= policy_distance(p, q, cfg) + policy_distance(q, r, cfg) + 1e-15);
        CHECK(policy_distance(p, q, cfg) <= 2.0);
    }
}

TEST_CASE("discounted Lipschitz constant") {
    const MetricConfig cfg(0.5, 0.75);
    CostBounds zero{.C = 0.0, .K = 0.0, .beta = 0.5, .abs_gamma = 1.0};
    CHECK(lipschitz_bound_discounted(4, zero, cfg) == 0.0);

    CostBounds b{.C = 1.0, .K = 2.0, .beta = 0.5, .abs_gamma = 1.0};
    CHECK(lipschitz_bound_discounted(1, b, cfg) == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(lipschitz_bound_discounted(std::nullopt, b, cfg) == doctest::Approx(6.0).epsilon(1e-15));
    for (int T = 1; T < 30; ++T)
        CHECK(lipschitz_bound_discounted(T, b, cfg) <= lipschitz_bound_discounted(T + 1, b, cfg));
}

TEST_CASE("risk-sensitive Lipschitz constant") {
    const MetricConfig cfg(0.5, 0.75);
    CostBounds b{.C = 1.0, .K = 2.0, .beta = 0.5, .abs_gamma = 1.0};
    CHECK(lipschitz_bound_rs(1, b, cfg) == doctest::Approx(4.0 * std::exp(1.0)).epsilon(1e-14));
    CHECK(lipschitz_bound_rs(3, b, cfg) == doctest::Approx(40.921619029374085).epsilon(1e-14));

    CostBounds tiny = b;
    tiny.abs_gamma = 1e-300;
    CHECK(lipschitz_bound_rs(3, tiny, cfg) == doctest::Approx(64.0 / 9.0).epsilon(1e-14));
}
