#include "mec/analysis.hpp"

#include "mec/error.hpp"

#include <cmath>
#include <cstdio>

namespace mec {

double queue_delay(const Eigen::VectorXd& pi, const StateSpace& space, double alpha) {
    if (!(alpha > 0.0)) throw UndefinedDelay("queueing delay is undefined when alpha = 0");
    double mean_q = 0.0;
    for (StateIndex i = 0; i < space.size(); ++i)
        mean_q += space.state(i).q * pi(static_cast<Eigen::Index>(i));
    return mean_q / alpha;
}

double local_fraction(const Eigen::VectorXd& pi, const Policy& policy) {
    const StateSpace& space = policy.space();
    double local = 0.0, cloud = 0.0, both = 0.0;
    for (StateIndex i = 0; i < space.size(); ++i) {
        const double w = pi(static_cast<Eigen::Index>(i));
        if (w == 0.0) continue;
        const SysState s = space.state(i);
        const DecisionProbs& g = policy.at(i);
        // S1 = {(i,m,0): i>=1}, S2 = {(i,0,n): i>=1}, S3 = {(i,0,0): i>=2}
        if (s.q >= 1 && s.c_l == 0) local += w * g[0];
        if (s.q >= 1 && s.c_t == 0) cloud += w * g[1];
        if (s.q >= 2 && s.c_t == 0 && s.c_l == 0) both += w * g[2];
    }
    const double denom = local + cloud + 2.0 * both;
    if (!(denom > 0.0)) throw NoThroughput("no task is ever scheduled");
    return (local + both) / denom;
}

double processing_time(double eta, const SystemParams& p) {
    return eta * p.local_slots + (1.0 - eta) * cloud_time(p);
}

PowerCoefficients power_coefficients(const SysState& s, const DecisionProbs& g,
                                     const SystemParams& p) {
    PowerCoefficients mu;
    if (s.c_l > 0)
        mu.mu_loc = 1.0;
    else if (s.q >= 2 && s.c_t == 0)
        mu.mu_loc = g[0] + g[2];
    else if (s.q >= 1)
        mu.mu_loc = g[0];

    if (s.c_t > 0)
        mu.mu_tx = p.beta;
    else if (s.q >= 2 && s.c_l == 0)
        mu.mu_tx = p.beta * (g[1] + g[2]);
    else if (s.q >= 1)
        mu.mu_tx = p.beta * g[1];
    return mu;
}

UnitActivity unit_activity(const SysState& s, Decision k) {
    return {s.c_l > 0 || starts_local(k), s.c_t > 0 || starts_cloud(k)};
}

AveragePower average_power(const Eigen::VectorXd& pi, const Policy& policy, const SystemParams& p) {
    AveragePower out;
    const StateSpace& space = policy.space();
    for (StateIndex i = 0; i < space.size(); ++i) {
        const double w = pi(static_cast<Eigen::Index>(i));
        if (w == 0.0) continue;
        const PowerCoefficients mu = power_coefficients(space.state(i), policy.at(i), p);
        out.nu_loc += w * mu.mu_loc;
        out.nu_tx += w * mu.mu_tx;
    }
    out.p_bar = out.nu_loc * p.p_loc + out.nu_tx * p.p_tx;
    return out;
}

double overflow_mass(const Eigen::VectorXd& pi, const StateSpace& space) {
    double mass = 0.0;
    for (StateIndex i = 0; i < space.size(); ++i)
        if (space.state(i).q == space.buffer_cap()) mass += pi(static_cast<Eigen::Index>(i));
    return mass;
}

Metrics metrics_from(const Eigen::VectorXd& pi, const Policy& policy, const SystemParams& p) {
    Metrics m;
    const StateSpace& space = policy.space();
    m.t_q = queue_delay(pi, space, p.alpha);
    m.eta = local_fraction(pi, policy);
    m.t_p = processing_time(m.eta, p);
    m.t_bar = total_delay(m.t_q, m.t_p);
    const AveragePower power = average_power(pi, policy, p);
    m.nu_loc = power.nu_loc;
    m.nu_tx = power.nu_tx;
    m.nu_tx_attempt = power.nu_tx / p.beta;
    m.p_bar = power.p_bar;
    m.overflow_mass = overflow_mass(pi, space);
    m.pi = pi;
    return m;
}

Metrics evaluate(const Policy& policy, const SystemParams& p, const DecisionKernel& kernel) {
    if (!(p.alpha > 0.0)) throw UndefinedDelay("evaluation needs alpha > 0");
    const SteadyState ss = steady_state(policy_kernel(kernel, policy));
    return metrics_from(ss.pi, policy, p);
}

Metrics evaluate(const Policy& policy, const SystemParams& p) {
    if (!(p.alpha > 0.0)) throw UndefinedDelay("evaluation needs alpha > 0");
    return evaluate(policy, p, DecisionKernel(p));
}

std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

std::string metrics_csv_header() {
    return "alpha,beta,policy_name,t_q,eta,t_p,t_bar,nu_loc,nu_tx,p_bar,overflow_mass,"
           "t_q_ms,t_p_ms,t_bar_ms,valid";
}

std::string metrics_csv_row(const SystemParams& p, std::string_view policy_name, const Metrics& m) {
    const double ms = p.slot_len * 1e3;
    std::string row;
    auto add = [&row](const std::string& cell) {
        if (!row.empty()) row += ',';
        row += cell;
    };
    add(format_number(p.alpha));
    add(format_number(p.beta));
    add(std::string(policy_name));
    for (double v : {m.t_q, m.eta, m.t_p, m.t_bar, m.nu_loc, m.nu_tx, m.p_bar, m.overflow_mass,
                     m.t_q * ms, m.t_p * ms, m.t_bar * ms})
        add(format_number(v));
    add(m.valid() ? "1" : "0");
    return row;
}

} // namespace mec
