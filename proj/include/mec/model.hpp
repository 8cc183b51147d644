#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace mec {

using StateIndex = std::size_t;

/// Slot-level description of the device, the channel and the MEC server.
/// Times are in slots unless the field name says otherwise.
struct SystemParams {
    double alpha = 0.0;      ///< task arrival probability per slot
    double beta = 1.0;       ///< probability that the channel is not in outage
    double slot_len = 0.02;  ///< seconds per slot
    int buffer_cap = 50;     ///< Q
    int packets_per_task = 1;///< M
    int local_slots = 1;     ///< N
    int cloud_slots = 1;     ///< N_cloud
    double feedback_slots = 0.0; ///< t_rx, enters the cloud time only
    double p_loc = 0.0;      ///< watts while the CPU is executing
    double p_tx = 0.0;       ///< watts while a packet is being delivered
    double p_max = 0.0;      ///< average power budget, watts

    /// Throws InvalidParameter if any invariant is broken.
    void validate() const;

    /// Size of the state space (Q+1)(M+1)N.
    std::size_t state_count() const;
};

/// Raw physical inputs from which the slot constants are derived.
struct PhysicalInputs {
    double data_bits = 0.0;       ///< L
    double cycles_per_task = 0.0; ///< C
    double f_loc = 0.0;           ///< Hz
    double f_ser = 0.0;           ///< Hz
    double bandwidth = 0.0;       ///< B, Hz
    double noise_power = 0.0;     ///< N0*B, watts
    double tx_power = 0.0;        ///< watts
    double mean_gain = 0.0;       ///< mean channel power gain
    double kappa = 0.0;           ///< P_loc = kappa * f_loc^3
};

/// Queue and slot settings that are not derivable from PhysicalInputs.
struct SlotSettings {
    double slot_len = 0.02;
    double alpha = 0.0;
    int buffer_cap = 50;
    int packets_per_task = 1;
    double feedback_slots = 0.0;
    std::optional<double> p_max;  ///< defaults to p_loc + beta * p_tx
};

/// Fills SystemParams from physical inputs. When `beta` is given it is used
/// as-is and the channel fields of `phys` are not consulted.
SystemParams derive_constants(const PhysicalInputs& phys, const SlotSettings& slot,
                              std::optional<double> beta = std::nullopt);

/// ceil(cycles / (freq * slot_len)), robust to the ratio landing a few ulps
/// above an integer.
int slots_for_cycles(double cycles, double freq, double slot_len);

/// Per-packet rate threshold R = L / (M * slot_len), bits/s.
double packet_rate(const PhysicalInputs& phys, double slot_len, int packets_per_task);

/// SNR threshold (2^{R/B} - 1) * N0B / P_tx for a given packet rate R.
double snr_threshold(const PhysicalInputs& phys, double rate);

/// Rayleigh-fading success probability exp(-snr_threshold / mean_gain), in (0, 1].
double outage_success_prob(const PhysicalInputs& phys, double rate);

/// Mean slots to deliver one task's packets: M / beta.
double transmission_time(const SystemParams& p);

/// t_tx + N_cloud + t_rx, in slots.
double cloud_time(const SystemParams& p);

/// The state triplet (q, c_T, c_L).
struct SysState {
    int q = 0;
    int c_t = 0;
    int c_l = 0;

    friend bool operator==(const SysState&, const SysState&) = default;
};

/// Lexicographic (q, c_t, c_l) enumeration of the state space with a
/// bijective index map.
class StateSpace {
  public:
    explicit StateSpace(const SystemParams& p)
        : q_cap_(p.buffer_cap), m_(p.packets_per_task), n_(p.local_slots) {}
    StateSpace(int buffer_cap, int packets_per_task, int local_slots)
        : q_cap_(buffer_cap), m_(packets_per_task), n_(local_slots) {}

    std::size_t size() const {
        return static_cast<std::size_t>(q_cap_ + 1) * static_cast<std::size_t>(m_ + 1) *
               static_cast<std::size_t>(n_);
    }

    StateIndex index(const SysState& s) const {
        return (static_cast<std::size_t>(s.q) * static_cast<std::size_t>(m_ + 1) +
                static_cast<std::size_t>(s.c_t)) *
                   static_cast<std::size_t>(n_) +
               static_cast<std::size_t>(s.c_l);
    }

    SysState state(StateIndex i) const {
        const int c_l = static_cast<int>(i % static_cast<std::size_t>(n_));
        i /= static_cast<std::size_t>(n_);
        const int c_t = static_cast<int>(i % static_cast<std::size_t>(m_ + 1));
        const int q = static_cast<int>(i / static_cast<std::size_t>(m_ + 1));
        return {q, c_t, c_l};
    }

    bool contains(const SysState& s) const {
        return s.q >= 0 && s.q <= q_cap_ && s.c_t >= 0 && s.c_t <= m_ && s.c_l >= 0 && s.c_l < n_;
    }

    int buffer_cap() const { return q_cap_; }
    int packets_per_task() const { return m_; }
    int local_slots() const { return n_; }

  private:
    int q_cap_;
    int m_;
    int n_;
};

std::vector<SysState> enumerate_states(const SystemParams& p);

} // namespace mec
