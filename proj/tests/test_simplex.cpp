#include "crsmdp/simplex.hpp"
#include "lp_suite.hpp"

#include <doctest.h>

#include <random>
#include <sstream>

using namespace crsmdp;
using testing::make_lp;

TEST_CASE("fixed LP suite") {
    for (const auto& c : testing::lp_suite()) {
        CAPTURE(c.name);
        const auto sol = solve_lp(c.problem);
        REQUIRE(sol.status == c.status);
        if (c.status != LpStatus::Optimal) continue;
        CHECK(sol.objective_value == doctest::Approx(c.value).epsilon(1e-12).scale(1.0));
        CHECK(sol.max_residual <= 1e-9);
        CHECK(sol.y.minCoeff() >= 0.0);
        if (c.y) CHECK((sol.y - *c.y).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("malformed problems are rejected") {
    auto p = make_lp({1, 1}, {{1, 1}}, {1}, {}, {});
    p.eq_rhs = testing::vec({1, 2});
    CHECK_THROWS_AS(solve_lp(p), Error);
    auto q = make_lp({1}, {}, {}, {{1}}, {1});
    q.ineq_matrix(0, 0) = std::numeric_limits<double>::infinity();
    CHECK_THROWS_AS(solve_lp(q), Error);
}

TEST_CASE("scaling the objective scales the value and keeps the vertex") {
    const auto base = make_lp({-3, -5}, {}, {}, {{1, 0}, {0, 2}, {3, 2}}, {4, 12, 18});
    const auto ref = solve_lp(base);
    for (double k : {1e-3, 0.5, 7.0, 1e4}) {
        auto p = base;
        p.objective *= k;
        const auto sol = solve_lp(p);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.objective_value == doctest::Approx(k * ref.objective_value).epsilon(1e-12));
        CHECK((sol.y - ref.y).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("random feasible LPs satisfy their constraints") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 6;
        // Rows with a known nonnegative solution x0 so the system is feasible; the
        // ≤ rows with positive coefficients keep it bounded.
        Vector x0(n);
        for (int j = 0; j < n; ++j) x0(j) = u(rng);
        auto p = LpProblem::with_variables(n);
        p.objective = Vector(n);
        for (int j = 0; j < n; ++j) p.objective(j) = u(rng) - 0.5;
        p.eq_matrix = Matrix(2, n);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < n; ++j) p.eq_matrix(i, j) = u(rng) - 0.3;
        p.eq_rhs = p.eq_matrix * x0;
        p.ineq_matrix = Matrix::Ones(1, n);
        p.ineq_rhs = testing::vec({x0.sum() + 1.0});
        const auto sol = solve_lp(p);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(lp_residual(p, sol.y) <= 1e-9);
        CHECK(sol.objective_value <= p.objective.dot(x0) + 1e-9);
    }
}

TEST_CASE("identical input gives identical output") {
    for (const auto& c : testing::lp_suite()) {
        const auto a = solve_lp(c.problem);
        const auto b = solve_lp(c.problem);
        CHECK(a.status == b.status);
        CHECK(a.pivots == b.pivots);
        if (a.status == LpStatus::Optimal) CHECK(a.y == b.y);
    }
}

TEST_CASE("plain-text dump") {
    std::ostringstream out;
    write_lp_text(out, make_lp({1, -1}, {{1, 1}}, {1}, {{1, 0}}, {2}));
    const auto text = out.str();
    CHECK(text.find("min") != std::string::npos);
    CHECK(text.find("end") != std::string::npos);
}

TEST_CASE("optimum is never below a constructed dual bound") {
    std::mt19937_64 rng(123);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int rows = 3, n = 7;
        Matrix a(rows, n);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < n; ++j) a(i, j) = u(rng);
        Vector x0 = Vector::NullaryExpr(n, [&] { return std::abs(u(rng)); });
        Vector dual = Vector::NullaryExpr(rows, [&] { return u(rng); });
        Vector reduced = Vector::NullaryExpr(n, [&] { return std::abs(u(rng)); });
        auto p = LpProblem::with_variables(n);
        p.eq_matrix = a;
        p.eq_rhs = a * x0;
        p.objective = a.transpose() * dual + reduced;
        p.ineq_matrix = Matrix(0, n);
        p.ineq_rhs = Vector(0);
        const auto sol = solve_lp(p);
        REQUIRE(sol.status == LpStatus::Optimal);
        CHECK(sol.objective_value >= p.eq_rhs.dot(dual) - 1e-9);
    }
}
