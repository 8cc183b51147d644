#pragma once

#include "mec/model.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

namespace mec {

/// Scheduling decision. The numbering follows the (v_C, v_L) convention:
/// local = (0,1), cloud = (1,0), both = (1,1), idle = (0,0).
enum class Decision : std::uint8_t { local = 1, cloud = 2, both = 3, idle = 4 };

inline constexpr std::array<Decision, 4> all_decisions{Decision::local, Decision::cloud,
                                                       Decision::both, Decision::idle};

/// Zero-based slot of a decision in 4-vectors.
constexpr std::size_t slot_of(Decision k) { return static_cast<std::size_t>(k) - 1; }

constexpr bool starts_local(Decision k) { return k == Decision::local || k == Decision::both; }
constexpr bool starts_cloud(Decision k) { return k == Decision::cloud || k == Decision::both; }

bool feasible(const SysState& s, Decision k);

/// Gamma_K(x): x for x < K, 0 for x == K.
int wrap_state(int x, int k);

/// Deterministic one-slot update of the system given the decision, the
/// arrival bit and the channel bit. Throws InfeasibleDecision.
SysState step(const SysState& s, Decision k, bool arrival, bool channel_ok,
              const SystemParams& p);

/// True when `step` with these inputs would drop the arriving task.
bool drops_arrival(const SysState& s, Decision k, bool arrival, const SystemParams& p);

struct Transition {
    StateIndex to = 0;
    double prob = 0.0;
};

/// Outcome distribution of one (state, decision) pair; at most four support
/// points after merging common destinations.
struct KernelRow {
    std::array<Transition, 4> out{};
    std::uint8_t size = 0;

    const Transition* begin() const { return out.data(); }
    const Transition* end() const { return out.data() + size; }
};

/// Decision-conditioned transition probabilities, independent of the policy.
class DecisionKernel {
  public:
    explicit DecisionKernel(const SystemParams& p);

    const StateSpace& space() const { return space_; }
    std::size_t state_count() const { return space_.size(); }

    bool has(StateIndex s, Decision k) const { return row_of_[s][slot_of(k)] >= 0; }

    /// Row for a feasible (s, k); throws InfeasibleDecision otherwise.
    const KernelRow& row(StateIndex s, Decision k) const;

  private:
    StateSpace space_;
    std::vector<KernelRow> rows_;
    std::vector<std::array<std::int32_t, 4>> row_of_;
};

DecisionKernel decision_kernel(const SystemParams& p);

class Policy;

using TransitionMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// chi = sum_k g^k * chi~_k, a sparse row-stochastic matrix.
TransitionMatrix policy_kernel(const DecisionKernel& kernel, const Policy& policy);

struct SteadyState {
    Eigen::VectorXd pi;
    double residual = 0.0;  ///< ||pi^T P - pi^T||_inf
};

/// Long-run distribution of the chain started from state 0, i.e. (0,0,0).
/// Closed classes reachable from the start are solved by sparse LU; when
/// more than one is reachable they are weighted by absorption probabilities.
SteadyState steady_state(const TransitionMatrix& p, StateIndex start = 0);

/// Three-column text dump: row index, column index, probability.
void write_matrix(std::ostream& os, const TransitionMatrix& p);

} // namespace mec
