#pragma once

#include "mec/model.hpp"
#include "mec/policy.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <vector>

namespace mec {

struct SimConfig {
    std::uint64_t slots = 1'000'000;
    std::optional<std::uint64_t> warmup;  ///< defaults to 10% of the horizon
    std::uint64_t seed = 1;

    std::uint64_t warmup_slots() const { return warmup ? *warmup : slots / 10; }
    void validate() const;
};

enum class Venue { local, cloud };

/// One simulated task. Slot numbers are slot boundaries: a task arriving in
/// slot t has arrival = t; a local task started in slot s completes at s + N.
struct TaskRecord {
    std::uint64_t arrival = 0;
    std::uint64_t start = 0;
    double completion = 0.0;
    Venue venue = Venue::local;

    double delay() const { return completion - static_cast<double>(arrival); }
};

struct SimReport {
    double mean_delay = 0.0;       ///< slots, over completed post-warmup tasks
    double mean_wait = 0.0;        ///< slots spent in the buffer
    double mean_queue_len = 0.0;
    double local_fraction = 0.0;
    double mean_power = 0.0;       ///< watts
    double delay_half_width = 0.0; ///< 95% batch-means half-width
    double wait_half_width = 0.0;
    double local_fraction_half_width = 0.0;
    double power_half_width = 0.0;
    Eigen::VectorXd occupancy;     ///< empirical state distribution
    std::uint64_t arrivals = 0;
    std::uint64_t completed_tasks = 0;
    std::uint64_t incomplete_tasks = 0;
    std::uint64_t dropped_tasks = 0;
    std::uint64_t measured_slots = 0;
};

/// Slot-by-slot Monte Carlo run of `policy`. Arrivals, channel states and
/// decisions draw from three independent streams derived from cfg.seed.
/// When `trace` is given, every post-warmup task is appended to it.
SimReport simulate(const Policy& policy, const SystemParams& p, const SimConfig& cfg,
                   std::vector<TaskRecord>* trace = nullptr);

/// arrival_slot,start_slot,completion_slot,venue,delay_slots
void write_task_trace_csv(std::ostream& os, const std::vector<TaskRecord>& trace);

} // namespace mec
