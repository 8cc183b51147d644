#include "mec/lp.hpp"

#include "mec/error.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace mec::lp {

std::string_view to_string(Status s) {
    switch (s) {
    case Status::optimal: return "optimal";
    case Status::infeasible: return "infeasible";
    case Status::unbounded: return "unbounded";
    }
    return "?";
}

void Problem::validate() const {
    if (cost.size() != a.cols()) throw InvalidArgument("cost length differs from column count");
    if (rhs.size() != a.rows()) throw InvalidArgument("rhs length differs from row count");
    if (!cost.allFinite() || !rhs.allFinite()) throw InvalidArgument("non-finite LP data");
    for (Eigen::Index j = 0; j < a.outerSize(); ++j)
        for (Eigen::SparseMatrix<double>::InnerIterator it(a, j); it; ++it)
            if (!std::isfinite(it.value())) throw InvalidArgument("non-finite constraint entry");
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

/// Rows and columns that survive presolve, in original numbering.
struct Reduced {
    std::vector<int> rows;
    std::vector<int> cols;
    bool infeasible = false;
    bool unbounded = false;
};

Reduced presolve(const Problem& p, const Options& opt) {
    Reduced red;
    const Eigen::Index m = p.rows(), n = p.variables();

    for (Eigen::Index j = 0; j < n; ++j) {
        bool empty = true;
        for (SpMat::InnerIterator it(p.a, j); it; ++it)
            if (it.value() != 0.0) {
                empty = false;
                break;
            }
        if (!empty)
            red.cols.push_back(static_cast<int>(j));
        else if (p.cost(j) < -opt.optimality_tol)
            red.unbounded = true;
    }

    // row-wise view to spot empty and duplicated rows
    std::vector<std::vector<std::pair<int, double>>> rows(static_cast<std::size_t>(m));
    for (int j : red.cols)
        for (SpMat::InnerIterator it(p.a, j); it; ++it)
            if (it.value() != 0.0) rows[static_cast<std::size_t>(it.row())].emplace_back(j, it.value());

    std::map<std::vector<std::pair<int, double>>, int> seen;
    const double btol = opt.feasibility_tol * std::max(1.0, p.rhs.lpNorm<Eigen::Infinity>());
    for (Eigen::Index i = 0; i < m; ++i) {
        auto& r = rows[static_cast<std::size_t>(i)];
        if (r.empty()) {
            if (std::abs(p.rhs(i)) > btol) red.infeasible = true;
            continue;
        }
        auto [it, fresh] = seen.emplace(std::move(r), static_cast<int>(i));
        if (!fresh) {
            if (std::abs(p.rhs(i) - p.rhs(it->second)) > btol) red.infeasible = true;
            continue;
        }
        red.rows.push_back(static_cast<int>(i));
    }
    return red;
}

/// Elementary column transform from one basis change (product form).
struct Eta {
    int row = 0;
    double pivot = 1.0;
    std::vector<int> idx;
    std::vector<double> val;
};

constexpr double kConditionLimit = 1e10;
/// Most negative basic value accepted in a reported solution.
constexpr double kReportTol = 1e-9;

class Simplex {
  public:
    Simplex(SpMat a, Eigen::VectorXd b, Eigen::VectorXd c, const Options& opt)
        : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)), opt_(opt),
          m_(static_cast<int>(a_.rows())), n_(static_cast<int>(a_.cols())) {
        // make b >= 0 so the artificial basis starts feasible
        for (int i = 0; i < m_; ++i)
            if (b_(i) < 0.0) {
                b_(i) = -b_(i);
                flipped_.push_back(i);
            }
        if (!flipped_.empty()) {
            std::vector<char> flip(static_cast<std::size_t>(m_), 0);
            for (int i : flipped_) flip[static_cast<std::size_t>(i)] = 1;
            for (int j = 0; j < n_; ++j)
                for (SpMat::InnerIterator it(a_, j); it; ++it)
                    if (flip[static_cast<std::size_t>(it.row())]) it.valueRef() = -it.value();
        }
        a_.makeCompressed();

        head_.resize(static_cast<std::size_t>(m_));
        where_.assign(static_cast<std::size_t>(n_ + m_), -1);
        for (int i = 0; i < m_; ++i) {
            head_[static_cast<std::size_t>(i)] = n_ + i;
            where_[static_cast<std::size_t>(n_ + i)] = i;
        }
        const std::size_t size = static_cast<std::size_t>(m_ + n_);
        max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * size;
        bland_after_ = opt_.bland_after ? opt_.bland_after : 10 * size;
        refactor();
    }

    /// Installs a basis given as one column (or -1) per row.
    bool try_basis(const std::vector<int>& cand) {
        std::vector<int> head(static_cast<std::size_t>(m_));
        std::vector<int> where(static_cast<std::size_t>(n_ + m_), -1);
        for (int i = 0; i < m_; ++i) {
            const int j = cand[static_cast<std::size_t>(i)] < 0 ? n_ + i : cand[static_cast<std::size_t>(i)];
            if (j >= n_ + m_ || where[static_cast<std::size_t>(j)] >= 0) return false;
            head[static_cast<std::size_t>(i)] = j;
            where[static_cast<std::size_t>(j)] = i;
        }
        const auto old_head = head_;
        const auto old_where = where_;
        head_ = std::move(head);
        where_ = std::move(where);
        bool ok = true;
        try {
            refactor();
            const double scale = std::max(1.0, b_.lpNorm<Eigen::Infinity>());
            ok = xb_.allFinite() && (basis_times(xb_) - b_).lpNorm<Eigen::Infinity>() <= 1e-9 * scale;
            if (ok) {
                // a near-singular basis shows up as a blown-up solve of a generic vector
                Eigen::VectorXd probe(m_);
                for (int i = 0; i < m_; ++i) probe(i) = 1.0 + 0.5 * std::sin(1.0 + i);
                const Eigen::VectorXd z = lu_.solve(probe);
                ok = z.allFinite() && z.lpNorm<Eigen::Infinity>() < kConditionLimit;
            }
            if (ok && xb_.minCoeff() < -opt_.feasibility_tol * scale)
                ok = repair(opt_.feasibility_tol * scale);
        } catch (const NumericalFailure&) {
            ok = false;
        }
        if (ok) {
            for (int i = 0; i < m_; ++i) xb_(i) = std::max(0.0, xb_(i));
            return true;
        }
        head_ = old_head;
        where_ = old_where;
        refactor();
        return false;
    }

    std::vector<int> basis() const { return head_; }

    Status run() {
        // phase 1: minimise the sum of artificials
        phase_cost_ = Eigen::VectorXd::Zero(n_ + m_);
        phase_cost_.tail(m_).setOnes();
        Status st = iterate(true);
        if (st != Status::optimal) throw NumericalFailure("phase 1 reported unbounded");

        double infeas = 0.0;
        for (int i = 0; i < m_; ++i)
            if (is_artificial(head_[static_cast<std::size_t>(i)])) infeas += std::max(0.0, xb_(i));
        const double tol = 10.0 * opt_.feasibility_tol * std::max(1.0, b_.lpNorm<Eigen::Infinity>());
        if (infeas > tol) return Status::infeasible;

        drive_out_artificials();

        phase_cost_.head(n_) = c_;
        phase_cost_.tail(m_).setZero();
        st = iterate(false);

        // the running basic values are clamped at zero; a fresh solve can show
        // small negatives, which are pivoted out before reporting
        for (int round = 0; st == Status::optimal && round < 3; ++round) {
            refactor();
            if (xb_.minCoeff() >= -kReportTol) break;
            if (!repair(kReportTol * 1e-2)) break;
            st = iterate(false);
        }
        refactor();
        return st;
    }

    Eigen::VectorXd primal() const {
        Eigen::VectorXd x = Eigen::VectorXd::Zero(n_);
        for (int i = 0; i < m_; ++i) {
            const int j = head_[static_cast<std::size_t>(i)];
            if (j < n_) x(j) = xb_(i);
        }
        return x;
    }

    /// Duals in the caller's row orientation.
    Eigen::VectorXd duals() {
        Eigen::VectorXd y = btran(basic_costs());
        for (int i : flipped_) y(i) = -y(i);
        return y;
    }

    std::size_t iterations() const { return iterations_; }
    void add_iterations(std::size_t k) { iterations_ += k; }


  private:
    bool is_artificial(int j) const { return j >= n_; }

    Eigen::VectorXd basic_costs() const {
        Eigen::VectorXd cb(m_);
        for (int i = 0; i < m_; ++i) cb(i) = phase_cost_(head_[static_cast<std::size_t>(i)]);
        return cb;
    }

    void refactor() {
        std::vector<Eigen::Triplet<double>> trip;
        trip.reserve(static_cast<std::size_t>(a_.nonZeros() / std::max(1, n_) + 2) * static_cast<std::size_t>(m_));
        for (int i = 0; i < m_; ++i) {
            const int j = head_[static_cast<std::size_t>(i)];
            if (is_artificial(j)) {
                trip.emplace_back(j - n_, i, 1.0);
            } else {
                for (SpMat::InnerIterator it(a_, j); it; ++it) trip.emplace_back(static_cast<int>(it.row()), i, it.value());
            }
        }
        SpMat basis(m_, m_);
        basis.setFromTriplets(trip.begin(), trip.end());
        basis.makeCompressed();
        lu_.analyzePattern(basis);
        lu_.factorize(basis);
        if (lu_.info() != Eigen::Success)
            throw NumericalFailure("basis factorization failed: " + lu_.lastErrorMessage());
        etas_.clear();
        xb_ = lu_.solve(b_);
    }

    Eigen::VectorXd ftran(const Eigen::VectorXd& rhs) {
        Eigen::VectorXd x = lu_.solve(rhs);
        for (const Eta& e : etas_) {
            const double xr = x(e.row) / e.pivot;
            if (xr != 0.0)
                for (std::size_t t = 0; t < e.idx.size(); ++t) x(e.idx[t]) -= e.val[t] * xr;
            x(e.row) = xr;
        }
        return x;
    }

    Eigen::VectorXd btran(Eigen::VectorXd z) {
        for (auto e = etas_.rbegin(); e != etas_.rend(); ++e) {
            double acc = z(e->row);
            for (std::size_t t = 0; t < e->idx.size(); ++t) acc -= e->val[t] * z(e->idx[t]);
            z(e->row) = acc / e->pivot;
        }
        return lu_.transpose().solve(z);
    }

    Eigen::VectorXd basis_times(const Eigen::VectorXd& v) const {
        Eigen::VectorXd out = Eigen::VectorXd::Zero(m_);
        for (int i = 0; i < m_; ++i) {
            const int j = head_[static_cast<std::size_t>(i)];
            if (is_artificial(j))
                out(j - n_) += v(i);
            else
                for (SpMat::InnerIterator it(a_, j); it; ++it) out(it.row()) += it.value() * v(i);
        }
        return out;
    }

    Eigen::VectorXd column(int j) const {
        Eigen::VectorXd col = Eigen::VectorXd::Zero(m_);
        if (is_artificial(j))
            col(j - n_) = 1.0;
        else
            for (SpMat::InnerIterator it(a_, j); it; ++it) col(it.row()) = it.value();
        return col;
    }

    double dot_column(const Eigen::VectorXd& y, int j) const {
        double s = 0.0;
        for (SpMat::InnerIterator it(a_, j); it; ++it) s += y(it.row()) * it.value();
        return s;
    }

    void pivot(int entering, int leave_row, const Eigen::VectorXd& d, double theta) {
        if (theta != 0.0) {
            xb_ -= theta * d;
            if (clamp_)
                for (int i = 0; i < m_; ++i)
                    if (xb_(i) < 0.0) xb_(i) = 0.0;
        }
        xb_(leave_row) = theta;

        Eta e;
        e.row = leave_row;
        e.pivot = d(leave_row);
        for (int i = 0; i < m_; ++i)
            if (i != leave_row && d(i) != 0.0) {
                e.idx.push_back(i);
                e.val.push_back(d(i));
            }
        etas_.push_back(std::move(e));

        const int leaving = head_[static_cast<std::size_t>(leave_row)];
        where_[static_cast<std::size_t>(leaving)] = -1;
        head_[static_cast<std::size_t>(leave_row)] = entering;
        where_[static_cast<std::size_t>(entering)] = leave_row;
        ++iterations_;

        if (static_cast<int>(etas_.size()) >= opt_.refactor_interval) refactor();
    }

    Status iterate(bool phase_one) {
        constexpr double kPivotTol = 1e-9;
        constexpr double kHarris = 1e-10;
        std::size_t degenerate = 0;

        for (;;) {
            if (iterations_ >= max_iter_) {
                throw NumericalFailure("simplex iteration cap reached after " + std::to_string(iterations_) +
                                           " pivots, phase " + (phase_one ? "1" : "2"),
                                       phase_one ? xb_.sum() : 0.0);
            }
            const bool bland = degenerate > bland_after_;
            const Eigen::VectorXd y = btran(basic_costs());

            int entering = -1;
            double best = -opt_.optimality_tol;
            for (int j = 0; j < n_; ++j) {
                if (where_[static_cast<std::size_t>(j)] >= 0) continue;
                const double dj = phase_cost_(j) - dot_column(y, j);
                if (dj < best) {
                    entering = j;
                    if (bland) break;
                    best = dj;
                }
            }
            if (entering < 0) return Status::optimal;

            const Eigen::VectorXd d = ftran(column(entering));

            // an artificial held at zero in phase 2 blocks any move that touches it
            int leave = -1;
            double theta = 0.0;
            if (!phase_one) {
                double piv = kPivotTol;
                for (int i = 0; i < m_; ++i)
                    if (is_artificial(head_[static_cast<std::size_t>(i)]) && std::abs(d(i)) > piv) {
                        piv = std::abs(d(i));
                        leave = i;
                    }
            }
            if (leave < 0 && bland) {
                double ratio_min = std::numeric_limits<double>::infinity();
                int best_var = std::numeric_limits<int>::max();
                for (int i = 0; i < m_; ++i) {
                    if (!(d(i) > kPivotTol)) continue;
                    const double r = std::max(0.0, xb_(i) / d(i));
                    const int var = head_[static_cast<std::size_t>(i)];
                    if (r < ratio_min || (r == ratio_min && var < best_var)) {
                        ratio_min = r;
                        best_var = var;
                        leave = i;
                    }
                }
                if (leave >= 0) theta = ratio_min;
            } else if (leave < 0) {
                // Harris two-pass: relax the bounds, then take the largest pivot
                double bound = std::numeric_limits<double>::infinity();
                for (int i = 0; i < m_; ++i)
                    if (d(i) > kPivotTol) bound = std::min(bound, (xb_(i) + kHarris) / d(i));
                double piv = 0.0;
                for (int i = 0; i < m_; ++i)
                    if (d(i) > kPivotTol && xb_(i) / d(i) <= bound && d(i) > piv) {
                        piv = d(i);
                        leave = i;
                    }
                if (leave >= 0) theta = std::max(0.0, xb_(leave) / d(leave));
            }
            if (leave < 0) {
                if (phase_one) throw NumericalFailure("phase 1 ray detected");
                return Status::unbounded;
            }
            if (leave < 0) throw NumericalFailure("ratio test found no pivot row");

            if (theta <= opt_.feasibility_tol * 1e-3)
                ++degenerate;
            else
                degenerate = 0;
            pivot(entering, leave, d, theta);
        }
    }

    /// Pivots a basis with negative entries back to feasibility by minimising
    /// the sum of infeasibilities, stopping at the first breakpoint each step.
    bool repair(double tol) {
        constexpr double kPivotTol = 1e-9;
        const std::size_t cap = 2 * static_cast<std::size_t>(m_ + n_);
        clamp_ = false;
        bool feasible = false;
        for (std::size_t step = 0; step < cap; ++step) {
            Eigen::VectorXd cb = Eigen::VectorXd::Zero(m_);
            for (int i = 0; i < m_; ++i)
                if (xb_(i) < -tol) cb(i) = -1.0;
            if (cb.isZero()) {
                feasible = true;
                break;
            }
            const Eigen::VectorXd y = btran(cb);
            int entering = -1;
            double best = -opt_.optimality_tol;
            for (int j = 0; j < n_; ++j) {
                if (where_[static_cast<std::size_t>(j)] >= 0) continue;
                const double dj = -dot_column(y, j);
                if (dj < best) {
                    best = dj;
                    entering = j;
                }
            }
            if (entering < 0) break;
            const Eigen::VectorXd d = ftran(column(entering));
            int leave = -1;
            double theta = std::numeric_limits<double>::infinity();
            double piv = 0.0;
            for (int i = 0; i < m_; ++i) {
                double r;
                if (xb_(i) >= -tol && d(i) > kPivotTol)
                    r = std::max(0.0, xb_(i)) / d(i);
                else if (xb_(i) < -tol && d(i) < -kPivotTol)
                    r = xb_(i) / d(i);
                else
                    continue;
                if (r < theta - 1e-12 || (r <= theta + 1e-12 && std::abs(d(i)) > piv)) {
                    theta = std::min(theta, r);
                    piv = std::abs(d(i));
                    leave = i;
                }
            }
            if (leave < 0) break;
            pivot(entering, leave, d, std::max(0.0, xb_(leave) / d(leave)));
        }
        clamp_ = true;
        return feasible;
    }

    void drive_out_artificials() {
        for (int r = 0; r < m_; ++r) {
            if (!is_artificial(head_[static_cast<std::size_t>(r)])) continue;
            Eigen::VectorXd e = Eigen::VectorXd::Zero(m_);
            e(r) = 1.0;
            const Eigen::VectorXd rho = btran(e);
            int best = -1;
            double mag = 1e-7;
            for (int j = 0; j < n_; ++j) {
                if (where_[static_cast<std::size_t>(j)] >= 0) continue;
                const double v = std::abs(dot_column(rho, j));
                if (v > mag) {
                    mag = v;
                    best = j;
                }
            }
            if (best < 0) continue;  // redundant row; its artificial stays basic at zero
            const Eigen::VectorXd d = ftran(column(best));
            xb_(r) = 0.0;
            pivot(best, r, d, 0.0);
        }
    }

    SpMat a_;
    Eigen::VectorXd b_;
    Eigen::VectorXd c_;
    Options opt_;
    int m_;
    int n_;
    std::vector<int> flipped_;

    std::vector<int> head_;   // basic variable per row
    std::vector<int> where_;  // row of a basic variable, -1 otherwise
    Eigen::VectorXd xb_;
    Eigen::VectorXd phase_cost_;
    Eigen::SparseLU<SpMat, Eigen::COLAMDOrdering<int>> lu_;
    std::vector<Eta> etas_;

    bool clamp_ = true;
    std::size_t iterations_ = 0;
    std::size_t max_iter_ = 0;
    std::size_t bland_after_ = 0;
};

} // namespace

Solution solve(const Problem& problem, const Options& options, std::span<const Basis> hints) {
    problem.validate();
    Solution sol;
    const Eigen::Index n = problem.variables();
    sol.x = Eigen::VectorXd::Zero(n);
    sol.duals = Eigen::VectorXd::Zero(problem.rows());
    sol.reduced_costs = problem.cost;

    const Reduced red = presolve(problem, options);
    if (red.infeasible) {
        sol.status = Status::infeasible;
        return sol;
    }

    const auto rows = static_cast<int>(red.rows.size());
    const auto cols = static_cast<int>(red.cols.size());
    std::vector<int> row_pos(static_cast<std::size_t>(problem.rows()), -1);
    for (int i = 0; i < rows; ++i) row_pos[static_cast<std::size_t>(red.rows[static_cast<std::size_t>(i)])] = i;

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(problem.a.nonZeros()));
    Eigen::VectorXd c(cols);
    for (int k = 0; k < cols; ++k) {
        const int j = red.cols[static_cast<std::size_t>(k)];
        c(k) = problem.cost(j);
        for (SpMat::InnerIterator it(problem.a, j); it; ++it) {
            const int r = row_pos[static_cast<std::size_t>(it.row())];
            if (r >= 0 && it.value() != 0.0) trip.emplace_back(r, k, it.value());
        }
    }
    SpMat a(rows, cols);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd b(rows);
    for (int i = 0; i < rows; ++i) b(i) = problem.rhs(red.rows[static_cast<std::size_t>(i)]);

    if (rows == 0) {
        // only sign constraints remain
        sol.status = red.unbounded || (c.array() < -options.optimality_tol).any() ? Status::unbounded
                                                                                   : Status::optimal;
        return sol;
    }

    std::vector<int> col_pos(static_cast<std::size_t>(n), -1);
    for (int k = 0; k < cols; ++k) col_pos[static_cast<std::size_t>(red.cols[static_cast<std::size_t>(k)])] = k;

    const SpMat a_copy = hints.empty() ? SpMat() : a;
    const Eigen::VectorXd b_copy = b;
    auto owner = std::make_unique<Simplex>(std::move(a), std::move(b), c, options);
    for (std::size_t h = 0; h < hints.size(); ++h) {
        const Basis& hint = hints[h];
        if (static_cast<Eigen::Index>(hint.size()) != problem.rows()) continue;
        std::vector<int> cand(static_cast<std::size_t>(rows), -1);
        for (int i = 0; i < rows; ++i) {
            const Eigen::Index j = hint[static_cast<std::size_t>(red.rows[static_cast<std::size_t>(i)])];
            if (j >= 0 && j < n) cand[static_cast<std::size_t>(i)] = col_pos[static_cast<std::size_t>(j)];
        }
        if (owner->try_basis(cand)) {
            sol.hint_used = static_cast<int>(h);
            break;
        }
    }
    Status st;
    try {
        st = owner->run();
    } catch (const NumericalFailure&) {
        if (sol.hint_used < 0) throw;
        // the hinted path ran into trouble; start over from the artificial basis
        const std::size_t spent = owner->iterations();
        sol.hint_used = -1;
        owner = std::make_unique<Simplex>(a_copy, b_copy, c, options);
        st = owner->run();
        owner->add_iterations(spent);
    }
    Simplex& simplex = *owner;
    sol.iterations = simplex.iterations();
    if (st != Status::optimal) {
        sol.status = st;
        return sol;
    }
    if (red.unbounded) {
        sol.status = Status::unbounded;
        return sol;
    }

    const Eigen::VectorXd xr = simplex.primal();
    const Eigen::VectorXd yr = simplex.duals();
    for (int k = 0; k < cols; ++k) sol.x(red.cols[static_cast<std::size_t>(k)]) = xr(k);
    for (int i = 0; i < rows; ++i) sol.duals(red.rows[static_cast<std::size_t>(i)]) = yr(i);
    sol.basis.assign(static_cast<std::size_t>(problem.rows()), -1);
    const std::vector<int> head = simplex.basis();
    for (int i = 0; i < rows; ++i) {
        const int j = head[static_cast<std::size_t>(i)];
        if (j < cols) sol.basis[static_cast<std::size_t>(red.rows[static_cast<std::size_t>(i)])] = red.cols[static_cast<std::size_t>(j)];
    }

    sol.status = Status::optimal;
    sol.objective = problem.cost.dot(sol.x);
    sol.reduced_costs = problem.cost - problem.a.transpose() * sol.duals;
    sol.residual = (problem.a * sol.x - problem.rhs).lpNorm<Eigen::Infinity>();
    const double limit = 1e-8 * std::max(1.0, problem.rhs.lpNorm<Eigen::Infinity>());
    if (!(sol.residual <= limit)) throw NumericalFailure("LP solution misses Ax = b", sol.residual);
    if (n > 0 && sol.x.minCoeff() < -kReportTol)
        throw NumericalFailure("LP solution violates x >= 0", sol.x.minCoeff());
    return sol;
}

void write_mps(std::ostream& os, const Problem& problem, std::string_view name) {
    char buf[128];
    auto num = [](double v) {
        char b[32];
        std::snprintf(b, sizeof b, "%.12g", v);
        return std::string(b);
    };
    os << "NAME          " << name << '\n' << "ROWS\n" << " N  COST\n";
    for (Eigen::Index i = 0; i < problem.rows(); ++i) {
        std::snprintf(buf, sizeof buf, " E  R%07ld\n", static_cast<long>(i));
        os << buf;
    }
    os << "COLUMNS\n";
    for (Eigen::Index j = 0; j < problem.variables(); ++j) {
        if (problem.cost(j) != 0.0) {
            std::snprintf(buf, sizeof buf, "    X%07ld  %-8s  %12s\n", static_cast<long>(j), "COST",
                          num(problem.cost(j)).c_str());
            os << buf;
        }
        for (SpMat::InnerIterator it(problem.a, j); it; ++it) {
            std::snprintf(buf, sizeof buf, "    X%07ld  R%07ld  %12s\n", static_cast<long>(j),
                          static_cast<long>(it.row()), num(it.value()).c_str());
            os << buf;
        }
    }
    os << "RHS\n";
    for (Eigen::Index i = 0; i < problem.rows(); ++i) {
        if (problem.rhs(i) == 0.0) continue;
        std::snprintf(buf, sizeof buf, "    RHS       R%07ld  %12s\n", static_cast<long>(i),
                      num(problem.rhs(i)).c_str());
        os << buf;
    }
    os << "ENDATA\n";
}

} // namespace mec::lp
