#include "mec/model.hpp"

#include "mec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace mec {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw InvalidParameter(what);
}

} // namespace

void SystemParams::validate() const {
    require(std::isfinite(alpha) && alpha >= 0.0 && alpha <= 1.0, "alpha must lie in [0,1]");
    require(std::isfinite(beta) && beta > 0.0 && beta <= 1.0, "beta must lie in (0,1]");
    require(std::isfinite(slot_len) && slot_len > 0.0, "slot_len must be positive");
    require(buffer_cap >= 1, "buffer_cap must be at least 1");
    require(packets_per_task >= 1, "packets_per_task must be at least 1");
    require(local_slots >= 1, "local_slots must be at least 1");
    require(cloud_slots >= 1, "cloud_slots must be at least 1");
    require(std::isfinite(feedback_slots) && feedback_slots >= 0.0,
            "feedback_slots must be non-negative");
    require(std::isfinite(p_loc) && p_loc >= 0.0, "p_loc must be non-negative");
    require(std::isfinite(p_tx) && p_tx >= 0.0, "p_tx must be non-negative");
    require(std::isfinite(p_max) && p_max >= 0.0, "p_max must be non-negative");
}

std::size_t SystemParams::state_count() const { return StateSpace(*this).size(); }

int slots_for_cycles(double cycles, double freq, double slot_len) {
    require(cycles > 0.0 && freq > 0.0 && slot_len > 0.0,
            "cycles, frequency and slot length must be positive");
    const double ratio = cycles / (freq * slot_len);
    double n = std::ceil(ratio);
    // C = f * slot_len up to rounding must give exactly one slot per unit
    if (n - 1.0 >= 1.0 && ratio - (n - 1.0) <= 1e-9 * ratio) n -= 1.0;
    require(n < 1e9, "derived slot count is unreasonably large");
    return static_cast<int>(n);
}

double packet_rate(const PhysicalInputs& phys, double slot_len, int packets_per_task) {
    require(phys.data_bits > 0.0, "data_bits must be positive");
    require(slot_len > 0.0 && packets_per_task >= 1, "invalid slot settings");
    return phys.data_bits / (packets_per_task * slot_len);
}

double snr_threshold(const PhysicalInputs& phys, double rate) {
    require(phys.bandwidth > 0.0, "bandwidth must be positive");
    require(phys.noise_power > 0.0, "noise_power must be positive");
    require(phys.tx_power > 0.0, "tx_power must be positive");
    require(rate >= 0.0, "rate must be non-negative");
    return std::expm1(rate / phys.bandwidth * std::log(2.0)) * phys.noise_power / phys.tx_power;
}

double outage_success_prob(const PhysicalInputs& phys, double rate) {
    require(phys.mean_gain > 0.0, "mean_gain must be positive");
    const double beta = std::exp(-snr_threshold(phys, rate) / phys.mean_gain);
    // a vanishing beta would make every cloud time infinite
    return std::max(beta, std::numeric_limits<double>::min());
}

SystemParams derive_constants(const PhysicalInputs& phys, const SlotSettings& slot,
                              std::optional<double> beta) {
    require(phys.data_bits > 0.0, "data_bits must be positive");
    require(phys.cycles_per_task > 0.0, "cycles_per_task must be positive");
    require(phys.f_loc > 0.0, "f_loc must be positive");
    require(phys.f_ser > 0.0, "f_ser must be positive");
    require(phys.kappa > 0.0, "kappa must be positive");
    require(phys.tx_power > 0.0, "tx_power must be positive");

    SystemParams p;
    p.alpha = slot.alpha;
    p.slot_len = slot.slot_len;
    p.buffer_cap = slot.buffer_cap;
    p.packets_per_task = slot.packets_per_task;
    p.feedback_slots = slot.feedback_slots;
    p.local_slots = slots_for_cycles(phys.cycles_per_task, phys.f_loc, slot.slot_len);
    p.cloud_slots = slots_for_cycles(phys.cycles_per_task, phys.f_ser, slot.slot_len);
    p.p_loc = phys.kappa * phys.f_loc * phys.f_loc * phys.f_loc;
    p.p_tx = phys.tx_power;
    p.beta = beta ? *beta
                  : outage_success_prob(phys, packet_rate(phys, slot.slot_len, slot.packets_per_task));
    p.p_max = slot.p_max ? *slot.p_max : p.p_loc + p.beta * p.p_tx;
    p.validate();
    return p;
}

double transmission_time(const SystemParams& p) {
    if (!(p.beta > 0.0)) throw DivergentTransmission("beta = 0: transmissions never succeed");
    return p.packets_per_task / p.beta;
}

double cloud_time(const SystemParams& p) {
    return transmission_time(p) + p.cloud_slots + p.feedback_slots;
}

std::vector<SysState> enumerate_states(const SystemParams& p) {
    const StateSpace space(p);
    std::vector<SysState> out;
    out.reserve(space.size());
    for (StateIndex i = 0; i < space.size(); ++i) out.push_back(space.state(i));
    return out;
}

} // namespace mec
