#pragma once

#include "crsmdp/model.hpp"

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace crsmdp {

/// minimize objective . y  subject to  eq_matrix y = eq_rhs,
///                                     ineq_matrix y <= ineq_rhs,  y >= 0.
struct LpProblem {
    Vector objective;
    Matrix eq_matrix;
    Vector eq_rhs;
    Matrix ineq_matrix;
    Vector ineq_rhs;

    // Optional labels, used only by write_lp_text and diagnostics.
    std::vector<std::string> variable_names;
    std::vector<std::string> eq_names;
    std::vector<std::string> ineq_names;

    int num_variables() const { return static_cast<int>(objective.size()); }

    /// Empty (0 x n) constraint blocks for an n-variable problem.
    static LpProblem with_variables(int n);
    /// Throws Error on inconsistent dimensions or non-finite entries.
    void validate() const;
};

enum class LpStatus { Optimal, Infeasible, Unbounded };

std::string_view to_string(LpStatus status);

struct LpSolution {
    LpStatus status = LpStatus::Infeasible;
    Vector y;  // set when Optimal
    double objective_value = 0.0;
    double max_residual = 0.0;
    long pivots = 0;
};

struct SimplexOptions {
    double pivot_tol = 1e-11;
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-9;
    long max_pivots = 10'000'000;
};

/// Raised when the tableau runs out of trustworthy pivots.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// Two-phase dense tableau simplex with Bland's rule. Deterministic: the same
/// problem always yields the same pivot sequence and output bits.
LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options = {});

/// Largest violation of equality rows, inequality rows and nonnegativity at y.
double lp_residual(const LpProblem& problem, const Vector& y);

/// Plain-text dump (min / st / bounds / end sections) for inspection with
/// other LP tools. Not meant to be read back.
void write_lp_text(std::ostream& out, const LpProblem& problem);

}  // namespace crsmdp
