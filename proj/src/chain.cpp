#include "mec/chain.hpp"

#include "mec/error.hpp"
#include "mec/policy.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace mec {

bool feasible(const SysState& s, Decision k) {
    switch (k) {
    case Decision::local: return s.q >= 1 && s.c_l == 0;
    case Decision::cloud: return s.q >= 1 && s.c_t == 0;
    case Decision::both: return s.q >= 2 && s.c_l == 0 && s.c_t == 0;
    case Decision::idle: return true;
    }
    return false;
}

int wrap_state(int x, int k) { return x < k ? x : 0; }

namespace {

std::string describe(const SysState& s, Decision k) {
    return "decision " + std::to_string(static_cast<int>(k)) + " infeasible in state (" +
           std::to_string(s.q) + "," + std::to_string(s.c_t) + "," + std::to_string(s.c_l) + ")";
}

int queue_after_service(const SysState& s, Decision k) {
    return s.q - (starts_local(k) ? 1 : 0) - (starts_cloud(k) ? 1 : 0);
}

} // namespace

SysState step(const SysState& s, Decision k, bool arrival, bool channel_ok, const SystemParams& p) {
    if (!feasible(s, k)) throw InfeasibleDecision(describe(s, k));
    const int n = p.local_slots;
    const int m = p.packets_per_task;

    SysState next;
    next.q = std::min(queue_after_service(s, k) + (arrival ? 1 : 0), p.buffer_cap);

    if (s.c_l > 0)
        next.c_l = wrap_state(s.c_l + 1, n);
    else
        next.c_l = starts_local(k) ? wrap_state(1, n) : 0;

    const int packet = s.c_t > 0 ? s.c_t : (starts_cloud(k) ? 1 : 0);
    if (packet == 0)
        next.c_t = 0;
    else
        next.c_t = channel_ok ? wrap_state(packet + 1, m + 1) : packet;
    return next;
}

bool drops_arrival(const SysState& s, Decision k, bool arrival, const SystemParams& p) {
    return arrival && queue_after_service(s, k) + 1 > p.buffer_cap;
}

DecisionKernel::DecisionKernel(const SystemParams& p) : space_(p) {
    p.validate();
    const std::size_t n = space_.size();
    row_of_.assign(n, {-1, -1, -1, -1});
    rows_.reserve(n * 2);

    const double a1 = p.alpha, a0 = 1.0 - p.alpha;
    const double s1 = p.beta, s0 = 1.0 - p.beta;
    const std::array<double, 4> weight{a0 * s0, a0 * s1, a1 * s0, a1 * s1};

    for (StateIndex i = 0; i < n; ++i) {
        const SysState s = space_.state(i);
        for (Decision k : all_decisions) {
            if (!feasible(s, k)) continue;
            KernelRow row;
            for (int outcome = 0; outcome < 4; ++outcome) {
                const double w = weight[outcome];
                if (w <= 0.0) continue;
                const bool arrival = outcome >= 2;
                const bool ok = (outcome & 1) != 0;
                const StateIndex to = space_.index(step(s, k, arrival, ok, p));
                auto* hit = std::find_if(row.out.begin(), row.out.begin() + row.size,
                                         [to](const Transition& t) { return t.to == to; });
                if (hit != row.out.begin() + row.size)
                    hit->prob += w;
                else
                    row.out[row.size++] = {to, w};
            }
            row_of_[i][slot_of(k)] = static_cast<std::int32_t>(rows_.size());
            rows_.push_back(row);
        }
    }
}

const KernelRow& DecisionKernel::row(StateIndex s, Decision k) const {
    const auto r = row_of_.at(s)[slot_of(k)];
    if (r < 0) throw InfeasibleDecision(describe(space_.state(s), k));
    return rows_[static_cast<std::size_t>(r)];
}

DecisionKernel decision_kernel(const SystemParams& p) { return DecisionKernel(p); }

TransitionMatrix policy_kernel(const DecisionKernel& kernel, const Policy& policy) {
    const std::size_t n = kernel.state_count();
    if (policy.size() != n) throw InvalidArgument("policy size does not match the state space");

    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * 6);
    for (StateIndex i = 0; i < n; ++i) {
        const auto& g = policy.at(i);
        for (Decision k : all_decisions) {
            const double gk = g[slot_of(k)];
            if (gk == 0.0) continue;
            for (const Transition& t : kernel.row(i, k))
                triplets.emplace_back(static_cast<int>(i), static_cast<int>(t.to), gk * t.prob);
        }
    }
    TransitionMatrix chi(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    chi.setFromTriplets(triplets.begin(), triplets.end());
    chi.makeCompressed();
    return chi;
}

namespace {

using SparseCol = Eigen::SparseMatrix<double>;

constexpr double kNegativeMassTol = 1e-12;

std::vector<int> reachable_from(const TransitionMatrix& p, int start) {
    std::vector<int> mark(static_cast<std::size_t>(p.rows()), 0);
    std::vector<int> stack{start}, order;
    mark[static_cast<std::size_t>(start)] = 1;
    while (!stack.empty()) {
        const int u = stack.back();
        stack.pop_back();
        order.push_back(u);
        for (TransitionMatrix::InnerIterator it(p, u); it; ++it) {
            if (it.value() <= 0.0) continue;
            const auto v = static_cast<std::size_t>(it.col());
            if (!mark[v]) {
                mark[v] = 1;
                stack.push_back(static_cast<int>(v));
            }
        }
    }
    std::sort(order.begin(), order.end());
    return order;
}

/// Iterative Tarjan restricted to the vertices flagged in `inside`.
std::vector<int> strong_components(const TransitionMatrix& p, const std::vector<char>& inside,
                                   int& count) {
    const auto n = static_cast<std::size_t>(p.rows());
    std::vector<int> comp(n, -1), low(n, 0), num(n, -1);
    std::vector<char> on_stack(n, 0);
    std::vector<int> stack;
    std::vector<std::pair<int, TransitionMatrix::InnerIterator>> call;
    int counter = 0;
    count = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (!inside[root] || num[root] >= 0) continue;
        auto visit = [&](int v) {
            num[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
            stack.push_back(v);
            on_stack[static_cast<std::size_t>(v)] = 1;
            call.emplace_back(v, TransitionMatrix::InnerIterator(p, v));
        };
        visit(static_cast<int>(root));
        while (!call.empty()) {
            auto& [v, it] = call.back();
            const auto vs = static_cast<std::size_t>(v);
            if (it) {
                const auto w = static_cast<std::size_t>(it.col());
                const bool edge = it.value() > 0.0 && inside[w];
                ++it;
                if (!edge) continue;
                if (num[w] < 0) {
                    visit(static_cast<int>(w));
                } else if (on_stack[w]) {
                    low[vs] = std::min(low[vs], num[w]);
                }
                continue;
            }
            if (low[vs] == num[vs]) {
                int w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[static_cast<std::size_t>(w)] = 0;
                    comp[static_cast<std::size_t>(w)] = count;
                } while (w != v);
                ++count;
            }
            const int done = v;
            call.pop_back();
            if (!call.empty()) {
                const auto parent = static_cast<std::size_t>(call.back().first);
                low[parent] = std::min(low[parent], low[static_cast<std::size_t>(done)]);
            }
        }
    }
    return comp;
}

/// Grassmann-Taksar-Heyman elimination on the band of the class's kernel.
/// Subtraction-free, so tiny stationary masses keep full relative accuracy.
Eigen::VectorXd gth_closed_class(const TransitionMatrix& p, const std::vector<int>& members,
                                 const std::vector<int>& local) {
    const auto k = static_cast<std::ptrdiff_t>(members.size());
    std::ptrdiff_t lower = 0, upper = 0;
    for (std::ptrdiff_t i = 0; i < k; ++i)
        for (TransitionMatrix::InnerIterator it(p, members[static_cast<std::size_t>(i)]); it; ++it) {
            const std::ptrdiff_t j = local[static_cast<std::size_t>(it.col())];
            if (j < 0 || it.value() == 0.0) continue;
            lower = std::max(lower, i - j);
            upper = std::max(upper, j - i);
        }
    const std::ptrdiff_t width = lower + upper + 1;
    std::vector<double> band(static_cast<std::size_t>(k * width), 0.0);
    auto at = [&](std::ptrdiff_t i, std::ptrdiff_t j) -> double& {
        return band[static_cast<std::size_t>(i * width + (j - i + lower))];
    };
    for (std::ptrdiff_t i = 0; i < k; ++i)
        for (TransitionMatrix::InnerIterator it(p, members[static_cast<std::size_t>(i)]); it; ++it) {
            const std::ptrdiff_t j = local[static_cast<std::size_t>(it.col())];
            if (j >= 0 && j != i) at(i, j) += it.value();
        }

    for (std::ptrdiff_t n = k - 1; n > 0; --n) {
        const std::ptrdiff_t j0 = std::max<std::ptrdiff_t>(0, n - lower);
        const std::ptrdiff_t i0 = std::max<std::ptrdiff_t>(0, n - upper);
        double s = 0.0;
        for (std::ptrdiff_t j = j0; j < n; ++j) s += at(n, j);
        if (!(s > 0.0)) throw NumericalFailure("closed class is not irreducible");
        for (std::ptrdiff_t i = i0; i < n; ++i) {
            double& f = at(i, n);
            if (f == 0.0) continue;
            f /= s;
            for (std::ptrdiff_t j = j0; j < n; ++j) at(i, j) += f * at(n, j);
        }
    }
    Eigen::VectorXd pi = Eigen::VectorXd::Zero(k);
    pi(0) = 1.0;
    for (std::ptrdiff_t j = 1; j < k; ++j) {
        double acc = 0.0;
        for (std::ptrdiff_t i = std::max<std::ptrdiff_t>(0, j - upper); i < j; ++i) acc += pi(i) * at(i, j);
        pi(j) = acc;
    }
    return pi / pi.sum();
}

/// Stationary distribution of a closed class given as sorted state indices.
/// Direct sparse LU first; an ill-conditioned class whose LU answer goes
/// negative is redone by GTH elimination.
Eigen::VectorXd solve_closed_class(const TransitionMatrix& p, const std::vector<int>& members) {
    const auto k = static_cast<Eigen::Index>(members.size());
    if (k == 1) return Eigen::VectorXd::Ones(1);
    std::vector<int> local(static_cast<std::size_t>(p.rows()), -1);
    for (Eigen::Index i = 0; i < k; ++i) local[static_cast<std::size_t>(members[static_cast<std::size_t>(i)])] = static_cast<int>(i);

    // (P^T - I) pi = 0 with the last balance equation replaced by sum(pi) = 1
    std::vector<Eigen::Triplet<double>> trip;
    for (Eigen::Index i = 0; i < k; ++i) {
        const int from = members[static_cast<std::size_t>(i)];
        for (TransitionMatrix::InnerIterator it(p, from); it; ++it) {
            const int to = local[static_cast<std::size_t>(it.col())];
            if (to < 0 || to == k - 1) continue;
            trip.emplace_back(to, static_cast<int>(i), it.value());
        }
        if (i != k - 1) trip.emplace_back(static_cast<int>(i), static_cast<int>(i), -1.0);
        trip.emplace_back(static_cast<int>(k - 1), static_cast<int>(i), 1.0);
    }
    SparseCol a(k, k);
    a.setFromTriplets(trip.begin(), trip.end());
    a.makeCompressed();

    Eigen::SparseLU<SparseCol> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success)
        throw NumericalFailure("steady-state system is singular: " + lu.lastErrorMessage());
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(k);
    rhs(k - 1) = 1.0;
    Eigen::VectorXd pi = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw NumericalFailure("steady-state solve failed");
    if (pi.allFinite() && pi.minCoeff() >= -kNegativeMassTol) return pi;
    return gth_closed_class(p, members, local);
}

} // namespace

SteadyState steady_state(const TransitionMatrix& p, StateIndex start) {
    const auto n = static_cast<std::size_t>(p.rows());
    if (p.rows() != p.cols() || start >= n) throw InvalidArgument("bad transition matrix");

    const std::vector<int> reach = reachable_from(p, static_cast<int>(start));
    std::vector<char> inside(n, 0);
    for (int v : reach) inside[static_cast<std::size_t>(v)] = 1;

    int ncomp = 0;
    const std::vector<int> comp = strong_components(p, inside, ncomp);

    std::vector<char> closed(static_cast<std::size_t>(ncomp), 1);
    for (int v : reach)
        for (TransitionMatrix::InnerIterator it(p, v); it; ++it)
            if (it.value() > 0.0 && comp[static_cast<std::size_t>(it.col())] != comp[static_cast<std::size_t>(v)])
                closed[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])] = 0;

    std::vector<std::vector<int>> classes;
    std::vector<int> class_of_comp(static_cast<std::size_t>(ncomp), -1);
    for (int c = 0; c < ncomp; ++c)
        if (closed[static_cast<std::size_t>(c)]) {
            class_of_comp[static_cast<std::size_t>(c)] = static_cast<int>(classes.size());
            classes.emplace_back();
        }
    std::vector<int> transient;
    for (int v : reach) {
        const int cls = class_of_comp[static_cast<std::size_t>(comp[static_cast<std::size_t>(v)])];
        if (cls >= 0)
            classes[static_cast<std::size_t>(cls)].push_back(v);
        else
            transient.push_back(v);
    }

    std::vector<double> weight(classes.size(), 1.0);
    if (classes.size() > 1) {
        // absorption probabilities from the start state: (I - P_TT) h = P_TC 1
        std::vector<int> local(n, -1);
        for (std::size_t i = 0; i < transient.size(); ++i) local[static_cast<std::size_t>(transient[i])] = static_cast<int>(i);
        const auto t = static_cast<Eigen::Index>(transient.size());
        const auto c = static_cast<Eigen::Index>(classes.size());
        std::vector<Eigen::Triplet<double>> trip;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(t, c);
        for (Eigen::Index i = 0; i < t; ++i) {
            trip.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
            for (TransitionMatrix::InnerIterator it(p, transient[static_cast<std::size_t>(i)]); it; ++it) {
                const auto to = static_cast<std::size_t>(it.col());
                if (local[to] >= 0)
                    trip.emplace_back(static_cast<int>(i), local[to], -it.value());
                else
                    rhs(i, class_of_comp[static_cast<std::size_t>(comp[to])]) += it.value();
            }
        }
        SparseCol a(t, t);
        a.setFromTriplets(trip.begin(), trip.end());
        a.makeCompressed();
        Eigen::SparseLU<SparseCol> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw NumericalFailure("absorption system is singular");
        const Eigen::MatrixXd h = lu.solve(rhs);
        const int s = local[start];
        for (Eigen::Index k = 0; k < c; ++k) weight[static_cast<std::size_t>(k)] = h(s, k);
    }

    SteadyState out;
    out.pi = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (weight[c] <= 0.0) continue;
        const Eigen::VectorXd part = solve_closed_class(p, classes[c]);
        for (std::size_t i = 0; i < classes[c].size(); ++i)
            out.pi(classes[c][i]) = weight[c] * part(static_cast<Eigen::Index>(i));
    }

    const double worst = out.pi.minCoeff();
    if (worst < -kNegativeMassTol) throw NumericalFailure("steady state has negative mass", worst);
    out.pi = out.pi.cwiseMax(0.0);
    out.pi /= out.pi.sum();

    const Eigen::VectorXd flow = p.transpose() * out.pi;
    out.residual = (flow - out.pi).lpNorm<Eigen::Infinity>();
    if (!(out.residual < 1e-9)) throw NumericalFailure("steady-state balance violated", out.residual);
    return out;
}

void write_matrix(std::ostream& os, const TransitionMatrix& p) {
    const auto flags = os.flags();
    const auto prec = os.precision();
    os << std::setprecision(17);
    for (Eigen::Index r = 0; r < p.outerSize(); ++r)
        for (TransitionMatrix::InnerIterator it(p, r); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    os.flags(flags);
    os.precision(prec);
}

} // namespace mec
