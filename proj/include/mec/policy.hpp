#pragma once

#include "mec/chain.hpp"
#include "mec/model.hpp"

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace mec {

/// Decision probabilities (g1, g2, g3, g4) for one state.
using DecisionProbs = std::array<double, 4>;

/// Stationary stochastic scheduling policy, stored densely over every state.
class Policy {
  public:
    Policy() = default;
    /// All-idle policy (g4 = 1 everywhere) on the given state space.
    explicit Policy(const StateSpace& space);

    const StateSpace& space() const { return space_; }
    std::size_t size() const { return table_.size(); }

    const DecisionProbs& at(StateIndex i) const { return table_.at(i); }
    const DecisionProbs& at(const SysState& s) const { return table_.at(space_.index(s)); }
    void set(StateIndex i, const DecisionProbs& g) { table_.at(i) = g; }
    void set(const SysState& s, const DecisionProbs& g) { table_.at(space_.index(s)) = g; }

    double prob(StateIndex i, Decision k) const { return table_.at(i)[slot_of(k)]; }

  private:
    StateSpace space_{1, 1, 1};
    std::vector<DecisionProbs> table_;
};

enum class Baseline { local, cloud, greedy };

Baseline parse_baseline(std::string_view name);
std::string_view to_string(Baseline b);

Policy make_baseline(Baseline which, const SystemParams& p);
Policy make_baseline(std::string_view name, const SystemParams& p);

struct PolicyViolation {
    enum class Kind { negative, infeasible, normalization };
    StateIndex state = 0;
    Kind kind = Kind::negative;
    int decision = 0;  ///< 1..4, or 0 for a normalization violation
    double value = 0.0;
};

/// Lists every (state, decision) that breaks nonnegativity, the feasibility
/// mask, or the unit-sum rule. Empty means the policy is valid.
std::vector<PolicyViolation> validate(const Policy& policy, const SystemParams& p);

std::string describe(const PolicyViolation& v, const StateSpace& space);

/// CSV with header q,c_t,c_l,g1,g2,g3,g4, values at 17 significant digits.
void write_policy_csv(std::ostream& os, const Policy& policy);

/// Reads the format above; every state must appear exactly once.
Policy read_policy_csv(std::istream& is, const SystemParams& p);

} // namespace mec
