#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

namespace mec::lp {

/// min c^T x  s.t.  A x = b,  x >= 0.
/// Inequalities must be turned into equalities with slack columns by the caller.
struct Problem {
    Eigen::VectorXd cost;
    Eigen::SparseMatrix<double> a;  ///< column-major, rows() x variables()
    Eigen::VectorXd rhs;

    Eigen::Index variables() const { return a.cols(); }
    Eigen::Index rows() const { return a.rows(); }

    /// Throws InvalidArgument on inconsistent sizes or non-finite entries.
    void validate() const;
};

enum class Status { optimal, infeasible, unbounded };

/// One entry per constraint row: the column basic in that row, or -1 for the
/// row's own artificial unit column.
using Basis = std::vector<Eigen::Index>;

std::string_view to_string(Status s);

struct Solution {
    Status status = Status::infeasible;
    Eigen::VectorXd x;              ///< primal point, meaningful when optimal
    double objective = 0.0;
    Eigen::VectorXd duals;          ///< row prices y with c - A^T y >= 0 at optimum
    Eigen::VectorXd reduced_costs;  ///< c - A^T y over all variables
    std::size_t iterations = 0;
    double residual = 0.0;          ///< ||A x - b||_inf
    Basis basis;                    ///< final basis, reusable as a starting hint
    int hint_used = -1;             ///< index of the accepted starting hint, -1 if none
};

struct Options {
    double feasibility_tol = 1e-8;
    double optimality_tol = 1e-8;
    int refactor_interval = 100;
    /// 0 means 50 * (rows + variables).
    std::size_t max_iterations = 0;
    /// Consecutive degenerate pivots before Bland's rule is engaged;
    /// 0 means 10 * (rows + variables).
    std::size_t bland_after = 0;
};

/// Two-phase revised primal simplex. Presolve drops empty columns and
/// duplicate rows. Throws NumericalFailure when the iteration cap is hit or
/// the final point misses the residual bound.
///
/// Starting bases in `hints` are tried in order; the first that factorizes
/// and gives a nonnegative basic solution replaces the all-artificial start.
/// Hints only change the path, never the set of optimal values.
Solution solve(const Problem& problem, const Options& options = {}, std::span<const Basis> hints = {});

/// Fixed-column MPS dump for cross-checking with external solvers.
void write_mps(std::ostream& os, const Problem& problem, std::string_view name = "MECP2");

} // namespace mec::lp
