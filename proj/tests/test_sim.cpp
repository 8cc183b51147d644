#include "mec/analysis.hpp"
#include "mec/error.hpp"
#include "mec/sim.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sstream>
#include <string>

using namespace mec;

namespace {

SimConfig run_length(std::uint64_t slots, std::uint64_t seed = 1) {
    SimConfig cfg;
    cfg.slots = slots;
    cfg.seed = seed;
    return cfg;
}

bool within(double got, double want, double rel) { return std::abs(got - want) <= rel * std::abs(want); }

} // namespace

TEST_CASE("no arrivals, no tasks") {
    const SystemParams p = test::reference_params(0.0, 5);
    const SimReport r = simulate(make_baseline("greedy", p), p, run_length(10'000));
    CHECK(r.arrivals == 0);
    CHECK(r.completed_tasks == 0);
    CHECK(r.mean_power == 0.0);
    CHECK(r.mean_delay == 0.0);
    CHECK(r.occupancy(0) == 1.0);
    CHECK(r.measured_slots == 9'000);
}

TEST_CASE("one-slot CPU: a task waits one slot and runs one slot") {
    SystemParams p = test::reference_params(1.0 / 3.0, 20);
    p.local_slots = 1;
    const SimReport r = simulate(make_baseline("local", p), p, run_length(1'000'000));
    CHECK(within(r.mean_delay, 2.0, 0.02));
    CHECK(within(r.mean_queue_len, 1.0 / 3.0, 0.02));
    CHECK(r.local_fraction == 1.0);
}

TEST_CASE("simulation agrees with the analytical metrics") {
    // agreement: the 95% interval around the estimate reaches the 2% band
    auto agrees = [](double sim, double half_width, double exact) {
        return std::abs(sim - exact) <= 0.02 * std::abs(exact) + half_width;
    };
    for (double alpha : {0.05, 0.2, 0.35}) {
        const SystemParams p = test::reference_params(alpha);
        for (const char* name : {"local", "cloud", "greedy"}) {
            const Policy pol = make_baseline(name, p);
            const Metrics m = evaluate(pol, p);
            if (!(m.overflow_mass < 1e-6)) continue;
            const std::string label = std::string(name) + " at " + std::to_string(alpha);
            CAPTURE(label);
            const SimReport r = simulate(pol, p, run_length(1'000'000, 3));
            CHECK(agrees(r.mean_delay, r.delay_half_width, m.t_bar));
            CHECK(agrees(r.mean_wait, r.wait_half_width, m.t_q));
            CHECK(agrees(r.mean_power, r.power_half_width, m.p_bar));
            CHECK(agrees(r.local_fraction, r.local_fraction_half_width, m.eta));
            CHECK(r.dropped_tasks == 0);
        }
    }
}

TEST_CASE("light loads agree within two percent outright") {
    const SystemParams p = test::reference_params(0.2);
    for (const char* name : {"cloud", "greedy"}) {
        const Policy pol = make_baseline(name, p);
        const Metrics m = evaluate(pol, p);
        const SimReport r = simulate(pol, p, run_length(1'000'000, 1));
        CHECK(within(r.mean_delay, m.t_bar, 0.02));
        CHECK(within(r.mean_wait, m.t_q, 0.02));
        CHECK(within(r.mean_power, m.p_bar, 0.02));
    }
}

TEST_CASE("empirical occupancy converges to the stationary distribution") {
    SystemParams p = test::reference_params(0.3, 10);
    p.local_slots = 3;
    const Policy pol = make_baseline("greedy", p);
    const Metrics m = evaluate(pol, p);
    const SimReport r = simulate(pol, p, run_length(1'000'000, 9));
    CHECK(test::total_variation(r.occupancy, m.pi) < 0.01);
}

TEST_CASE("Little's law inside the simulator") {
    const SystemParams p = test::reference_params(0.25);
    const SimReport r = simulate(make_baseline("greedy", p), p, run_length(1'000'000, 4));
    CHECK(within(r.mean_queue_len / p.alpha, r.mean_wait, 0.02));
}

TEST_CASE("stable runs lose no tasks") {
    const SystemParams p = test::reference_params(0.2);
    const Policy pol = make_baseline("cloud", p);
    REQUIRE(evaluate(pol, p).overflow_mass < 1e-6);
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
        CHECK(simulate(pol, p, run_length(1'000'000, seed)).dropped_tasks == 0);
}

TEST_CASE("overloaded buffer drops tasks") {
    const SystemParams p = test::reference_params(0.3, 5);
    const SimReport r = simulate(make_baseline("local", p), p, run_length(100'000));
    CHECK(r.dropped_tasks > 0);
    CHECK(r.arrivals == r.dropped_tasks + r.completed_tasks + r.incomplete_tasks);
}

TEST_CASE("same seed, same report; different seed, different report") {
    const SystemParams p = test::reference_params(0.2, 20);
    const Policy pol = make_baseline("greedy", p);
    const SimReport a = simulate(pol, p, run_length(200'000, 7));
    const SimReport b = simulate(pol, p, run_length(200'000, 7));
    const SimReport c = simulate(pol, p, run_length(200'000, 8));
    CHECK(a.mean_delay == b.mean_delay);
    CHECK(a.mean_power == b.mean_power);
    CHECK(a.delay_half_width == b.delay_half_width);
    CHECK(a.occupancy == b.occupancy);
    CHECK(a.arrivals == b.arrivals);
    CHECK(a.mean_delay != c.mean_delay);
}

TEST_CASE("task trace") {
    SystemParams p = test::reference_params(0.2, 10);
    p.feedback_slots = 0.5;
    std::vector<TaskRecord> trace;
    SimConfig cfg = run_length(5'000);
    cfg.warmup = 0;
    const SimReport r = simulate(make_baseline("greedy", p), p, cfg, &trace);
    CHECK(trace.size() == r.completed_tasks);
    for (const TaskRecord& t : trace) {
        CHECK(t.start > t.arrival);
        if (t.venue == Venue::local)
            CHECK(t.completion == static_cast<double>(t.start + 17));
        else
            CHECK(t.completion >= static_cast<double>(t.start) + 1 + 1 + 0.5);
    }
    std::ostringstream os;
    write_task_trace_csv(os, {{3, 4, 21.0, Venue::local}, {5, 6, 9.5, Venue::cloud}});
    CHECK(os.str() == "arrival_slot,start_slot,completion_slot,venue,delay_slots\n"
                      "3,4,21,local,18\n5,6,9.5,cloud,4.5\n");
}

TEST_CASE("configuration checks") {
    const SystemParams p = test::reference_params(0.2, 10);
    SimConfig cfg = run_length(0);
    CHECK_THROWS_AS(simulate(make_baseline("cloud", p), p, cfg), InvalidParameter);
    cfg = run_length(100);
    cfg.warmup = 100;
    CHECK_THROWS_AS(simulate(make_baseline("cloud", p), p, cfg), InvalidParameter);
    CHECK_THROWS_AS(simulate(Policy(StateSpace(3, 1, 1)), p, run_length(100)), InvalidArgument);
}
