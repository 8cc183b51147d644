#pragma once

#include "mec/analysis.hpp"
#include "mec/chain.hpp"
#include "mec/lp.hpp"
#include "mec/model.hpp"
#include "mec/policy.hpp"

#include <Eigen/Core>

#include <iosfwd>
#include <string_view>
#include <utility>
#include <vector>

namespace mec {

/// Stationary state-decision probabilities x_tau^k. Entries for infeasible
/// (state, decision) pairs are always zero.
class OccupationMeasure {
  public:
    explicit OccupationMeasure(const StateSpace& space)
        : space_(space), x_(space.size(), DecisionProbs{0.0, 0.0, 0.0, 0.0}) {}

    const StateSpace& space() const { return space_; }
    const DecisionProbs& at(StateIndex i) const { return x_.at(i); }
    double& at(StateIndex i, Decision k) { return x_.at(i)[slot_of(k)]; }
    double at(StateIndex i, Decision k) const { return x_.at(i)[slot_of(k)]; }

    double total() const;
    /// pi_tau = sum_k x_tau^k
    Eigen::VectorXd state_marginal() const;

  private:
    StateSpace space_;
    std::vector<DecisionProbs> x_;
};

/// Problem P2 at a fixed eta, in equality form.
/// Row 0 is the power budget (with a slack column), row 1 the local-fraction
/// row Gamma(x, eta) = 0, then one balance row per state except the last,
/// and finally the normalisation row.
struct P2Instance {
    lp::Problem problem;
    std::vector<std::pair<StateIndex, Decision>> vars;  ///< column -> (state, decision)
    Eigen::Index slack = 0;                             ///< power slack column
    double constant = 0.0;                              ///< eta*N + (1-eta)*t_c
    double eta = 0.0;
    StateSpace space{1, 1, 1};

    static constexpr Eigen::Index power_row = 0;
    static constexpr Eigen::Index gamma_row = 1;
};

P2Instance build_p2(const SystemParams& p, double eta, const DecisionKernel& kernel);
P2Instance build_p2(const SystemParams& p, double eta);

/// A feasible starting basis for P2: the always-idle policy's occupation
/// measure (all mass ends at a full queue) with the power slack basic and the
/// local-fraction row left to its artificial.
lp::Basis idle_basis(const P2Instance& inst);

/// Maps an LP point back onto the state-decision table, clamping tiny negatives.
OccupationMeasure occupation_from(const P2Instance& inst, const Eigen::VectorXd& x);

/// Occupation mass at or below this is treated as absent.
inline constexpr double kMassFloor = 1e-9;

/// g = x / sum_k x on states carrying mass. A state without mass copies the
/// rule of the nearest lower-q state with the same unit counters that has
/// mass and starts tasks with positive probability (decisions feasible there
/// stay feasible with a longer queue); when no such state exists it idles
/// (g4 = 1).
Policy recover_policy(const OccupationMeasure& x);

/// max_tau |F_tau(x)|
double balance_residual(const OccupationMeasure& x, const DecisionKernel& kernel);
/// Gamma(x, eta)
double local_fraction_gap(const OccupationMeasure& x, double eta);
/// nu_loc(x) * P_loc + beta * nu_tx(x) * P_tx
double occupation_power(const OccupationMeasure& x, const SystemParams& p);
/// (1/alpha) sum q x + eta N + (1-eta) t_c
double occupation_delay(const OccupationMeasure& x, const SystemParams& p, double eta);
/// Long-run rate of task starts (local + cloud) implied by x.
double start_rate(const OccupationMeasure& x);

enum class GridStatus { optimal, infeasible, unbounded, no_throughput };
std::string_view to_string(GridStatus s);

struct GridPoint {
    double eta = 0.0;
    GridStatus status = GridStatus::infeasible;
    double t_bar = 0.0;  ///< T'(eta), slots; meaningful when optimal
    std::size_t iterations = 0;
};

struct SynthesisResult {
    double eta_star = 0.0;
    double t_bar_star = 0.0;
    bool refined = false;       ///< eta_star came from the refinement step, not the grid
    Policy policy;
    OccupationMeasure occupation{StateSpace(1, 1, 1)};
    std::vector<GridPoint> trace;
    Metrics metrics;            ///< analysis of the recovered policy
    double roundtrip_tv = 0.0;  ///< TV(steady state of policy, sum_k x)
};

struct SearchOptions {
    int grid = 100;  ///< J
    /// Start each grid point from the previous point's optimal basis when it
    /// stays feasible. Grid points are always solved in increasing eta order.
    bool warm_start = true;
    /// Golden-section search of eta between the grid neighbours of the grid
    /// winner; the refined point replaces the winner only when it is better.
    bool refine = false;
    double refine_tol = 1e-9;  ///< final bracket width in eta
    lp::Options lp;
};

/// One-dimensional search over eta in {0, 1/J, ..., 1}, optionally refined
/// between grid points. Throws
/// SynthesisInfeasible when no grid point yields a schedulable solution.
SynthesisResult search_optimal(const SystemParams& p, const SearchOptions& options = {});

/// Columns eta,status,t_bar.
void write_trace_csv(std::ostream& os, const std::vector<GridPoint>& trace);

} // namespace mec
