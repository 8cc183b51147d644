#pragma once

// Shared fixtures and independent reference implementations for the tests.
// Nothing in here calls into the chain, analysis or synth modules.

#include "mec/model.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <random>
#include <tuple>
#include <vector>

namespace mec::test {

/// Reference scenario: beta 0.4, N 17, one cloud slot, 0.8 W CPU, 1 W radio.
inline SystemParams reference_params(double alpha, int buffer_cap = 50) {
    SystemParams p;
    p.alpha = alpha;
    p.beta = 0.4;
    p.slot_len = 0.02;
    p.buffer_cap = buffer_cap;
    p.packets_per_task = 1;
    p.local_slots = 17;
    p.cloud_slots = 1;
    p.feedback_slots = 0.0;
    p.p_loc = 0.8;
    p.p_tx = 1.0;
    p.p_max = 1.2;
    return p;
}

/// Q=3, M=1, N=2, alpha 0.3, beta 0.5 with a budget no policy can exceed.
inline SystemParams tiny_params() {
    SystemParams p;
    p.alpha = 0.3;
    p.beta = 0.5;
    p.buffer_cap = 3;
    p.packets_per_task = 1;
    p.local_slots = 2;
    p.cloud_slots = 1;
    p.p_loc = 0.8;
    p.p_tx = 1.0;
    p.p_max = 10.0;
    return p;
}

using Triple = std::tuple<int, int, int>;
using Row = std::map<Triple, double>;

/// Transition row of one state under decision probabilities g, written out
/// case by case from the explicit formulas for the four (c_T, c_L) regimes.
/// Arrivals into a full buffer are lost, so destinations are capped at Q.
inline Row case_table_row(Triple from, const std::array<double, 4>& g, double a, double b, int cap_q,
                          int m_pk, int n_loc) {
    auto gam = [](int x, int k) { return x == k ? 0 : x; };
    Row r;
    auto add = [&](int q, int ct, int cl, double w) {
        if (w == 0.0) return;
        r[{std::min(q, cap_q), ct, cl}] += w;
    };
    const auto [i, m, n] = from;
    const double g1 = g[0], g2 = g[1], g3 = g[2];

    if (m == 0 && n == 0) {
        if (i >= 2) {
            const double rest = 1.0 - g1 - g2 - g3;
            add(i, 0, gam(1, n_loc), a * g1);
            add(i, 1, 0, a * (1 - b) * g2);
            add(i, gam(2, m_pk + 1), 0, a * b * g2);
            add(i - 1, 1, gam(1, n_loc), a * (1 - b) * g3);
            add(i - 1, gam(2, m_pk + 1), gam(1, n_loc), a * b * g3);
            add(i + 1, 0, 0, a * rest);
            add(i - 1, 0, gam(1, n_loc), (1 - a) * g1);
            add(i - 1, 1, 0, (1 - a) * (1 - b) * g2);
            add(i - 1, gam(2, m_pk + 1), 0, (1 - a) * b * g2);
            add(i - 2, 1, gam(1, n_loc), (1 - a) * (1 - b) * g3);
            add(i - 2, gam(2, m_pk + 1), gam(1, n_loc), (1 - a) * b * g3);
            add(i, 0, 0, (1 - a) * rest);
        } else if (i == 1) {
            const double rest = 1.0 - g1 - g2;
            add(1, 0, gam(1, n_loc), a * g1);
            add(1, 1, 0, a * (1 - b) * g2);
            add(1, gam(2, m_pk + 1), 0, a * b * g2);
            add(2, 0, 0, a * rest);
            add(0, 0, gam(1, n_loc), (1 - a) * g1);
            add(0, 1, 0, (1 - a) * (1 - b) * g2);
            add(0, gam(2, m_pk + 1), 0, (1 - a) * b * g2);
            add(1, 0, 0, (1 - a) * rest);
        } else {
            add(1, 0, 0, a);
            add(0, 0, 0, 1 - a);
        }
    } else if (m > 0 && n == 0) {
        const int mu = gam(m + 1, m_pk + 1);
        if (i >= 1) {
            add(i, mu, gam(1, n_loc), a * b * g1);
            add(i, m, gam(1, n_loc), a * (1 - b) * g1);
            add(i + 1, mu, 0, a * b * (1 - g1));
            add(i + 1, m, 0, a * (1 - b) * (1 - g1));
            add(i - 1, mu, gam(1, n_loc), (1 - a) * b * g1);
            add(i - 1, m, gam(1, n_loc), (1 - a) * (1 - b) * g1);
            add(i, mu, 0, (1 - a) * b * (1 - g1));
            add(i, m, 0, (1 - a) * (1 - b) * (1 - g1));
        } else {
            add(1, mu, 0, a * b);
            add(1, m, 0, a * (1 - b));
            add(0, mu, 0, (1 - a) * b);
            add(0, m, 0, (1 - a) * (1 - b));
        }
    } else if (m == 0 && n > 0) {
        const int nu = gam(n + 1, n_loc);
        if (i >= 1) {
            add(i, 1, nu, a * (1 - b) * g2);
            add(i, gam(2, m_pk + 1), nu, a * b * g2);
            add(i + 1, 0, nu, a * (1 - g2));
            add(i - 1, 1, nu, (1 - a) * (1 - b) * g2);
            add(i - 1, gam(2, m_pk + 1), nu, (1 - a) * b * g2);
            add(i, 0, nu, (1 - a) * (1 - g2));
        } else {
            add(1, 0, nu, a);
            add(0, 0, nu, 1 - a);
        }
    } else {
        const int mu = gam(m + 1, m_pk + 1);
        const int nu = gam(n + 1, n_loc);
        add(i + 1, mu, nu, a * b);
        add(i + 1, m, nu, a * (1 - b));
        add(i, mu, nu, (1 - a) * b);
        add(i, m, nu, (1 - a) * (1 - b));
    }
    return r;
}

/// Random decision probabilities restricted to the decisions allowed in
/// `s`, with a chance of a deterministic choice.
template <class Rng>
std::array<double, 4> random_rule(Triple s, Rng& rng) {
    const auto [q, ct, cl] = s;
    std::array<bool, 4> allowed{q >= 1 && cl == 0, q >= 1 && ct == 0, q >= 2 && ct == 0 && cl == 0, true};
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::array<double, 4> g{};
    const bool pure = u(rng) < 0.25;
    double total = 0.0;
    if (pure) {
        std::vector<int> opts;
        for (int k = 0; k < 4; ++k)
            if (allowed[k]) opts.push_back(k);
        g[opts[std::uniform_int_distribution<std::size_t>(0, opts.size() - 1)(rng)]] = 1.0;
        return g;
    }
    for (int k = 0; k < 4; ++k) {
        g[k] = allowed[k] ? u(rng) : 0.0;
        total += g[k];
    }
    for (double& v : g) v /= total;
    return g;
}

/// Stationary vector of a small dense irreducible stochastic matrix.
inline Eigen::VectorXd dense_stationary(const Eigen::MatrixXd& p) {
    const Eigen::Index n = p.rows();
    Eigen::MatrixXd a = p.transpose() - Eigen::MatrixXd::Identity(n, n);
    a.row(n - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    rhs(n - 1) = 1.0;
    return a.fullPivLu().solve(rhs);
}

/// Mean buffer length under "offload whenever the transmitter is free" with
/// one packet per task, from a (queue, transmitter) chain built by hand.
inline double cloud_only_mean_queue(double a, double b, int cap_q) {
    const int n = 2 * (cap_q + 1);
    auto idx = [](int q, int busy) { return 2 * q + busy; };
    Eigen::MatrixXd p = Eigen::MatrixXd::Zero(n, n);
    for (int q = 0; q <= cap_q; ++q)
        for (int busy = 0; busy <= 1; ++busy) {
            int left = q;
            int tx = busy;
            if (!busy && q >= 1) {
                left = q - 1;
                tx = 1;
            }
            for (int arr = 0; arr <= 1; ++arr) {
                const double pa = arr ? a : 1 - a;
                const int q2 = std::min(left + arr, cap_q);
                if (tx) {
                    p(idx(q, busy), idx(q2, 0)) += pa * b;
                    p(idx(q, busy), idx(q2, 1)) += pa * (1 - b);
                } else {
                    p(idx(q, busy), idx(q2, 0)) += pa;
                }
            }
        }
    const Eigen::VectorXd pi = dense_stationary(p);
    double mean = 0.0;
    for (int q = 0; q <= cap_q; ++q) mean += q * (pi(idx(q, 0)) + pi(idx(q, 1)));
    return mean;
}

inline double total_variation(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return 0.5 * (a - b).cwiseAbs().sum();
}

} // namespace mec::test
