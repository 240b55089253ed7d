#include "crsmdp/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace crsmdp {

LpProblem LpProblem::with_variables(int n) {
    LpProblem p;
    p.objective = Vector::Zero(n);
    p.eq_matrix = Matrix::Zero(0, n);
    p.eq_rhs = Vector::Zero(0);
    p.ineq_matrix = Matrix::Zero(0, n);
    p.ineq_rhs = Vector::Zero(0);
    return p;
}

void LpProblem::validate() const {
    const auto n = objective.size();
    if (eq_matrix.cols() != n || ineq_matrix.cols() != n)
        throw Error("LP: constraint matrices must have one column per variable");
    if (eq_matrix.rows() != eq_rhs.size() || ineq_matrix.rows() != ineq_rhs.size())
        throw Error("LP: right-hand side length differs from row count");
    if (!objective.allFinite() || !eq_matrix.allFinite() || !eq_rhs.allFinite() ||
        !ineq_matrix.allFinite() || !ineq_rhs.allFinite())
        throw Error("LP: non-finite coefficient");
}

std::string_view to_string(LpStatus status) {
    switch (status) {
        case LpStatus::Optimal: return "optimal";
        case LpStatus::Infeasible: return "infeasible";
        case LpStatus::Unbounded: return "unbounded";
    }
    return "unknown";
}

double lp_residual(const LpProblem& problem, const Vector& y) {
    double r = 0.0;
    if (y.size()) r = std::max(r, -y.minCoeff());
    if (problem.eq_rhs.size())
        r = std::max(r, (problem.eq_matrix * y - problem.eq_rhs).cwiseAbs().maxCoeff());
    if (problem.ineq_rhs.size())
        r = std::max(r, (problem.ineq_matrix * y - problem.ineq_rhs).maxCoeff());
    return r;
}

namespace {

/// Row-major tableau. Columns: structural | slack | artificial, then the
/// right-hand side in a separate vector. The cost row holds reduced costs.
class Tableau {
public:
    Tableau(const LpProblem& p, const SimplexOptions& opt) : opt_(opt) {
        num_struct_ = p.num_variables();
        const int n_eq = static_cast<int>(p.eq_rhs.size());
        const int n_in = static_cast<int>(p.ineq_rhs.size());
        rows_ = n_eq + n_in;
        num_slack_ = n_in;

        // Rows that need an artificial: every equality row, and inequality rows
        // whose right-hand side is negative (their slack enters with -1).
        std::vector<int> art_row;
        for (int i = 0; i < n_eq; ++i) art_row.push_back(i);
        for (int j = 0; j < n_in; ++j)
            if (p.ineq_rhs(j) < 0.0) art_row.push_back(n_eq + j);
        num_art_ = static_cast<int>(art_row.size());
        cols_ = num_struct_ + num_slack_ + num_art_;

        a_.assign(static_cast<std::size_t>(rows_) * cols_, 0.0);
        rhs_.assign(rows_, 0.0);
        basis_.assign(rows_, -1);
        active_.assign(rows_, true);

        for (int i = 0; i < n_eq; ++i) {
            const double sign = p.eq_rhs(i) < 0.0 ? -1.0 : 1.0;
            for (int k = 0; k < num_struct_; ++k) at(i, k) = sign * p.eq_matrix(i, k);
            rhs_[i] = sign * p.eq_rhs(i);
        }
        for (int j = 0; j < n_in; ++j) {
            const int i = n_eq + j;
            const double sign = p.ineq_rhs(j) < 0.0 ? -1.0 : 1.0;
            for (int k = 0; k < num_struct_; ++k) at(i, k) = sign * p.ineq_matrix(j, k);
            at(i, num_struct_ + j) = sign;
            rhs_[i] = sign * p.ineq_rhs(j);
            if (sign > 0.0) basis_[i] = num_struct_ + j;
        }
        for (int r = 0; r < num_art_; ++r) {
            const int col = num_struct_ + num_slack_ + r;
            at(art_row[r], col) = 1.0;
            basis_[art_row[r]] = col;
        }
    }

    double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * cols_ + j]; }
    double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * cols_ + j]; }

    bool is_artificial(int col) const { return col >= num_struct_ + num_slack_; }

    /// Phase I: minimize the sum of artificials. Returns that minimum.
    double phase_one() {
        cost_.assign(cols_, 0.0);
        cost_value_ = 0.0;
        for (int c = num_struct_ + num_slack_; c < cols_; ++c) cost_[c] = 1.0;
        price_out();
        allow_artificial_ = true;
        if (!iterate())
            throw NumericalError("LP: numerically degenerate (phase I found no usable pivot)");
        return -cost_value_;
    }

    /// Pivots artificials out of the basis, dropping redundant rows.
    void purge_artificials() {
        for (int i = 0; i < rows_; ++i) {
            if (!active_[i] || !is_artificial(basis_[i])) continue;
            int entering = -1;
            for (int j = 0; j < num_struct_ + num_slack_; ++j) {
                if (std::abs(at(i, j)) > opt_.pivot_tol) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) active_[i] = false;
            else pivot(i, entering);
        }
        allow_artificial_ = false;
    }

    /// Phase II on the real objective. Returns false when unbounded.
    bool phase_two(const Vector& objective) {
        cost_.assign(cols_, 0.0);
        cost_value_ = 0.0;
        for (int k = 0; k < num_struct_; ++k) cost_[k] = objective(k);
        price_out();
        return iterate();
    }

    Vector structural_values() const {
        Vector y = Vector::Zero(num_struct_);
        for (int i = 0; i < rows_; ++i)
            if (active_[i] && basis_[i] < num_struct_) y(basis_[i]) = rhs_[i];
        return y;
    }

    long pivots() const { return pivots_; }

private:
    // Make the cost row consistent with the current basis.
    void price_out() {
        for (int i = 0; i < rows_; ++i) {
            if (!active_[i]) continue;
            const double cb = cost_[basis_[i]];
            if (cb == 0.0) continue;
            for (int j = 0; j < cols_; ++j) cost_[j] -= cb * at(i, j);
            cost_value_ -= cb * rhs_[i];
        }
    }

    // Bland's rule iterations. Returns false when no blocking row exists.
    bool iterate() {
        const int limit = allow_artificial_ ? cols_ : num_struct_ + num_slack_;
        for (;;) {
            int entering = -1;
            for (int j = 0; j < limit; ++j) {
                if (cost_[j] < -opt_.optimality_tol) {
                    entering = j;
                    break;
                }
            }
            if (entering < 0) return true;

            int leaving = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int i = 0; i < rows_; ++i) {
                if (!active_[i]) continue;
                const double aij = at(i, entering);
                if (aij <= opt_.pivot_tol) continue;
                const double ratio = rhs_[i] / aij;
                const double tie = 1e-12 * (1.0 + std::abs(best));
                if (leaving < 0 || ratio < best - tie) {
                    best = ratio;
                    leaving = i;
                } else if (ratio <= best + tie && basis_[i] < basis_[leaving]) {
                    leaving = i;
                }
            }
            if (leaving < 0) return false;
            pivot(leaving, entering);
            if (++pivots_ > opt_.max_pivots) throw NumericalError("LP: pivot limit exceeded");
        }
    }

    void pivot(int row, int col) {
        double* pr = &a_[static_cast<std::size_t>(row) * cols_];
        const double inv = 1.0 / pr[col];
        for (int j = 0; j < cols_; ++j) pr[j] *= inv;
        pr[col] = 1.0;
        rhs_[row] *= inv;
        if (rhs_[row] < 0.0 && rhs_[row] > -opt_.feasibility_tol) rhs_[row] = 0.0;

        for (int i = 0; i < rows_; ++i) {
            if (i == row || !active_[i]) continue;
            double* pi = &a_[static_cast<std::size_t>(i) * cols_];
            const double f = pi[col];
            if (f == 0.0) continue;
            for (int j = 0; j < cols_; ++j) pi[j] -= f * pr[j];
            pi[col] = 0.0;
            rhs_[i] -= f * rhs_[row];
            if (rhs_[i] < 0.0 && rhs_[i] > -opt_.feasibility_tol) rhs_[i] = 0.0;
        }
        const double f = cost_[col];
        if (f != 0.0) {
            for (int j = 0; j < cols_; ++j) cost_[j] -= f * pr[j];
            cost_[col] = 0.0;
            cost_value_ -= f * rhs_[row];
        }
        basis_[row] = col;
    }

    SimplexOptions opt_;
    int rows_ = 0;
    int cols_ = 0;
    int num_struct_ = 0;
    int num_slack_ = 0;
    int num_art_ = 0;
    std::vector<double> a_;
    std::vector<double> rhs_;
    std::vector<double> cost_;
    double cost_value_ = 0.0;  // minus the current objective value
    std::vector<int> basis_;
    std::vector<bool> active_;
    bool allow_artificial_ = true;
    long pivots_ = 0;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem, const SimplexOptions& options) {
    problem.validate();
    Tableau tab(problem, options);
    LpSolution sol;

    const double infeasibility = tab.phase_one();
    if (infeasibility > options.feasibility_tol) {
        sol.status = LpStatus::Infeasible;
        sol.pivots = tab.pivots();
        return sol;
    }
    tab.purge_artificials();
    const bool bounded = tab.phase_two(problem.objective);
    sol.pivots = tab.pivots();
    if (!bounded) {
        sol.status = LpStatus::Unbounded;
        return sol;
    }
    sol.status = LpStatus::Optimal;
    sol.y = tab.structural_values();
    sol.objective_value = problem.objective.dot(sol.y);
    sol.max_residual = lp_residual(problem, sol.y);
    return sol;
}

namespace {

void write_row(std::ostream& out, const Eigen::Ref<const Eigen::RowVectorXd>& row,
               const LpProblem& p) {
    bool any = false;
    for (Eigen::Index k = 0; k < row.size(); ++k) {
        if (row(k) == 0.0) continue;
        out << (row(k) < 0 ? " - " : " + ") << std::abs(row(k)) << ' '
            << (k < static_cast<Eigen::Index>(p.variable_names.size()) ? p.variable_names[k]
                                                                      : "y" + std::to_string(k));
        any = true;
    }
    if (!any) out << " 0";
}

std::string label(const std::vector<std::string>& names, std::size_t i, const char* prefix) {
    return i < names.size() ? names[i] : prefix + std::to_string(i);
}

}  // namespace

void write_lp_text(std::ostream& out, const LpProblem& p) {
    const auto old_precision = out.precision(17);
    out << "min\n obj:";
    write_row(out, p.objective.transpose(), p);
    out << "\nst\n";
    for (Eigen::Index i = 0; i < p.eq_matrix.rows(); ++i) {
        out << ' ' << label(p.eq_names, i, "eq") << ':';
        write_row(out, p.eq_matrix.row(i), p);
        out << " = " << p.eq_rhs(i) << '\n';
    }
    for (Eigen::Index i = 0; i < p.ineq_matrix.rows(); ++i) {
        out << ' ' << label(p.ineq_names, i, "in") << ':';
        write_row(out, p.ineq_matrix.row(i), p);
        out << " <= " << p.ineq_rhs(i) << '\n';
    }
    out << "bounds\n all variables >= 0\nend\n";
    out.precision(old_precision);
}

}  // namespace crsmdp
