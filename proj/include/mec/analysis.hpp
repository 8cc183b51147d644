#pragma once

#include "mec/chain.hpp"
#include "mec/model.hpp"
#include "mec/policy.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <string_view>

namespace mec {

/// Overflow mass at or above which the no-overflow assumption behind the
/// closed-form delay is considered broken.
inline constexpr double kOverflowLimit = 1e-3;

/// Closed-form performance of one policy. Times are in slots.
struct Metrics {
    double t_q = 0.0;
    double eta = 0.0;
    double t_p = 0.0;
    double t_bar = 0.0;
    double nu_loc = 0.0;          ///< CPU-active probability
    double nu_tx = 0.0;           ///< successful-transmission probability (beta folded in)
    double nu_tx_attempt = 0.0;   ///< transmission-attempt probability, nu_tx / beta
    double p_bar = 0.0;           ///< watts
    double overflow_mass = 0.0;   ///< Pr{q = Q}
    Eigen::VectorXd pi;

    bool valid() const { return overflow_mass < kOverflowLimit; }
};

/// (1/alpha) * E[q]. Throws UndefinedDelay when alpha == 0.
double queue_delay(const Eigen::VectorXd& pi, const StateSpace& space, double alpha);

/// Long-run fraction of task starts that go to the local CPU.
/// Throws NoThroughput when no task is ever started.
double local_fraction(const Eigen::VectorXd& pi, const Policy& policy);

double processing_time(double eta, const SystemParams& p);
inline double total_delay(double t_q, double t_p) { return t_q + t_p; }

struct PowerCoefficients {
    double mu_loc = 0.0;
    double mu_tx = 0.0;  ///< includes the factor beta
};

/// Per-state probabilities that the CPU runs and that a packet is delivered.
PowerCoefficients power_coefficients(const SysState& s, const DecisionProbs& g,
                                     const SystemParams& p);

/// Whether the CPU runs / a packet transmission is attempted in this slot
/// under decision k.
struct UnitActivity {
    bool cpu = false;
    bool tx = false;
};
UnitActivity unit_activity(const SysState& s, Decision k);

struct AveragePower {
    double nu_loc = 0.0;
    double nu_tx = 0.0;
    double p_bar = 0.0;
};

AveragePower average_power(const Eigen::VectorXd& pi, const Policy& policy, const SystemParams& p);

double overflow_mass(const Eigen::VectorXd& pi, const StateSpace& space);

/// Kernel, steady state and every metric for one policy.
Metrics evaluate(const Policy& policy, const SystemParams& p);
Metrics evaluate(const Policy& policy, const SystemParams& p, const DecisionKernel& kernel);

/// Metrics from an already computed distribution.
Metrics metrics_from(const Eigen::VectorXd& pi, const Policy& policy, const SystemParams& p);

/// alpha,beta,policy_name,t_q,eta,t_p,t_bar,nu_loc,nu_tx,p_bar,overflow_mass,
/// then the millisecond columns and the validity flag.
std::string metrics_csv_header();
std::string metrics_csv_row(const SystemParams& p, std::string_view policy_name, const Metrics& m);

/// %.12g formatting used by every CSV writer of the toolkit.
std::string format_number(double v);

} // namespace mec
