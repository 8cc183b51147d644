#include "mec/sim.hpp"

#include "mec/analysis.hpp"
#include "mec/chain.hpp"
#include "mec/error.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <random>

namespace mec {

void SimConfig::validate() const {
    if (slots < 1) throw InvalidParameter("simulation needs at least one slot");
    if (warmup_slots() >= slots) throw InvalidParameter("warmup must be shorter than the horizon");
}

namespace {

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Uniform [0,1) stream with a fixed bit-to-double mapping.
class Stream {
  public:
    Stream(std::uint64_t seed, std::uint64_t id) {
        std::uint64_t s = seed ^ (0xD1B54A32D192ED03ULL * (id + 1));
        std::seed_seq seq{static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s)),
                          static_cast<std::uint32_t>(splitmix64(s)), static_cast<std::uint32_t>(splitmix64(s))};
        engine_.seed(seq);
    }
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  private:
    std::mt19937_64 engine_;
};

Decision sample_decision(const SysState& s, const DecisionProbs& g, double u) {
    double total = 0.0;
    for (Decision k : all_decisions)
        if (feasible(s, k)) total += g[slot_of(k)];
    if (!(total > 0.0)) return Decision::idle;
    double acc = 0.0;
    const double target = u * total;
    Decision last = Decision::idle;
    for (Decision k : all_decisions) {
        if (!feasible(s, k) || g[slot_of(k)] <= 0.0) continue;
        acc += g[slot_of(k)];
        last = k;
        if (target < acc) return k;
    }
    return last;
}

/// Batch-means 95% half-width with a fixed batch count.
class BatchMeans {
  public:
    explicit BatchMeans(std::size_t expected) : per_batch_(std::max<std::size_t>(1, expected / kBatches)) {}

    void add(double v) {
        acc_ += v;
        if (++in_batch_ == per_batch_) {
            means_.push_back(acc_ / static_cast<double>(per_batch_));
            acc_ = 0.0;
            in_batch_ = 0;
        }
    }

    double half_width() const {
        const std::size_t b = means_.size();
        if (b < 2) return std::numeric_limits<double>::infinity();
        double mean = 0.0;
        for (double m : means_) mean += m;
        mean /= static_cast<double>(b);
        double var = 0.0;
        for (double m : means_) var += (m - mean) * (m - mean);
        var /= static_cast<double>(b - 1);
        return t_quantile(b - 1) * std::sqrt(var / static_cast<double>(b));
    }

  private:
    static constexpr std::size_t kBatches = 32;

    // two-sided 97.5% Student-t quantiles; 2.04 covers 31 degrees of freedom
    static double t_quantile(std::size_t dof) {
        static constexpr double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306,
                                           2.262,  2.228, 2.201, 2.179, 2.160, 2.145, 2.131, 2.120,
                                           2.110,  2.101, 2.093, 2.086, 2.080, 2.074, 2.069, 2.064,
                                           2.060,  2.056, 2.052, 2.048, 2.045, 2.042, 2.040};
        return dof <= 31 ? table[dof - 1] : 1.96;
    }

    std::size_t per_batch_;
    std::size_t in_batch_ = 0;
    double acc_ = 0.0;
    std::vector<double> means_;
};

struct QueuedTask {
    std::uint64_t arrival;
};

} // namespace

SimReport simulate(const Policy& policy, const SystemParams& p, const SimConfig& cfg,
                   std::vector<TaskRecord>* trace) {
    p.validate();
    cfg.validate();
    const StateSpace space(p);
    if (policy.size() != space.size()) throw InvalidArgument("policy size does not match the state space");

    Stream arrivals(cfg.seed, 0), channel(cfg.seed, 1), decisions(cfg.seed, 2);

    const std::uint64_t warmup = cfg.warmup_slots();
    const std::uint64_t horizon = cfg.slots;
    const double cloud_tail = p.cloud_slots + p.feedback_slots;

    SimReport rep;
    rep.occupancy = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(space.size()));
    rep.measured_slots = horizon - warmup;

    std::deque<QueuedTask> buffer;
    std::vector<TaskRecord> tasks;
    tasks.reserve(static_cast<std::size_t>(static_cast<double>(horizon) * p.alpha * 1.05) + 16);
    std::optional<TaskRecord> sending;

    BatchMeans power_batches(rep.measured_slots);
    double power_sum = 0.0, queue_sum = 0.0;
    std::uint64_t local_starts = 0, cloud_starts = 0;

    auto launch = [&](std::uint64_t t, Venue venue) -> TaskRecord {
        TaskRecord rec{buffer.front().arrival, t, 0.0, venue};
        buffer.pop_front();
        if (rec.arrival >= warmup) ++(venue == Venue::local ? local_starts : cloud_starts);
        return rec;
    };
    auto finish = [&](const TaskRecord& rec) {
        if (rec.arrival >= warmup) tasks.push_back(rec);
    };

    SysState state{0, 0, 0};
    for (std::uint64_t t = 0; t < horizon; ++t) {
        const bool measuring = t >= warmup;
        const StateIndex idx = space.index(state);
        if (measuring) {
            rep.occupancy(static_cast<Eigen::Index>(idx)) += 1.0;
            queue_sum += state.q;
        }

        const Decision k = sample_decision(state, policy.at(idx), decisions.uniform());
        const bool channel_ok = channel.uniform() < p.beta;
        const bool arrival = arrivals.uniform() < p.alpha;

        // the buffer is FIFO; with two starts the older task goes to the CPU
        if (starts_local(k)) {
            TaskRecord rec = launch(t, Venue::local);
            rec.completion = static_cast<double>(t + static_cast<std::uint64_t>(p.local_slots));
            finish(rec);
        }
        if (starts_cloud(k)) sending = launch(t, Venue::cloud);

        const UnitActivity act = unit_activity(state, k);
        double power = act.cpu ? p.p_loc : 0.0;
        if (act.tx && channel_ok) {
            power += p.p_tx;
            const int packet = state.c_t > 0 ? state.c_t : 1;
            if (packet == p.packets_per_task) {
                sending->completion = static_cast<double>(t + 1) + cloud_tail;
                finish(*sending);
                sending.reset();
            }
        }

        if (arrival) {
            if (drops_arrival(state, k, arrival, p)) {
                if (measuring) ++rep.dropped_tasks;
            } else {
                buffer.push_back({t});
            }
            if (measuring) ++rep.arrivals;
        }

        if (measuring) {
            power_sum += power;
            power_batches.add(power);
        }
        state = step(state, k, arrival, channel_ok, p);
    }

    // tasks still queued or in service at the horizon
    for (const QueuedTask& q : buffer)
        if (q.arrival >= warmup) ++rep.incomplete_tasks;
    if (sending && sending->arrival >= warmup) ++rep.incomplete_tasks;

    const double horizon_d = static_cast<double>(horizon);
    BatchMeans delay_batches(tasks.size()), wait_batches(tasks.size()), venue_batches(tasks.size());
    double delay_sum = 0.0, wait_sum = 0.0;
    std::sort(tasks.begin(), tasks.end(),
              [](const TaskRecord& a, const TaskRecord& b) { return a.arrival < b.arrival; });
    for (const TaskRecord& rec : tasks) {
        if (rec.completion > horizon_d) {
            ++rep.incomplete_tasks;
            continue;
        }
        ++rep.completed_tasks;
        delay_sum += rec.delay();
        wait_sum += static_cast<double>(rec.start - rec.arrival);
        delay_batches.add(rec.delay());
        wait_batches.add(static_cast<double>(rec.start - rec.arrival));
        venue_batches.add(rec.venue == Venue::local ? 1.0 : 0.0);
    }

    const double slots = static_cast<double>(rep.measured_slots);
    rep.occupancy /= slots;
    rep.mean_queue_len = queue_sum / slots;
    rep.mean_power = power_sum / slots;
    rep.power_half_width = power_batches.half_width();
    if (rep.completed_tasks > 0) {
        rep.mean_delay = delay_sum / static_cast<double>(rep.completed_tasks);
        rep.mean_wait = wait_sum / static_cast<double>(rep.completed_tasks);
        rep.delay_half_width = delay_batches.half_width();
        rep.wait_half_width = wait_batches.half_width();
        rep.local_fraction_half_width = venue_batches.half_width();
    }
    if (local_starts + cloud_starts > 0)
        rep.local_fraction = static_cast<double>(local_starts) / static_cast<double>(local_starts + cloud_starts);
    if (trace) {
        for (const TaskRecord& rec : tasks)
            if (rec.completion <= horizon_d) trace->push_back(rec);
    }
    return rep;
}

void write_task_trace_csv(std::ostream& os, const std::vector<TaskRecord>& trace) {
    os << "arrival_slot,start_slot,completion_slot,venue,delay_slots\n";
    for (const TaskRecord& rec : trace)
        os << rec.arrival << ',' << rec.start << ',' << format_number(rec.completion) << ','
           << (rec.venue == Venue::local ? "local" : "cloud") << ',' << format_number(rec.delay()) << '\n';
}

} // namespace mec
