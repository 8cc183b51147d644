#include "mec/analysis.hpp"
#include "mec/error.hpp"
#include "mec/policy.hpp"
#include "mec/sim.hpp"

#include "support.hpp"

#include <doctest.h>

#include <sstream>

using namespace mec;

namespace {

bool has(const std::vector<PolicyViolation>& v, StateIndex s, PolicyViolation::Kind kind, int decision) {
    for (const auto& x : v)
        if (x.state == s && x.kind == kind && x.decision == decision) return true;
    return false;
}

} // namespace

TEST_CASE("baseline rules in individual states") {
    const SystemParams p = test::reference_params(0.2);
    const Policy local = make_baseline("local", p);
    const Policy cloud = make_baseline("cloud", p);
    const Policy greedy = make_baseline("greedy", p);
    CHECK(local.at(SysState{3, 1, 0}) == DecisionProbs{1, 0, 0, 0});
    CHECK(cloud.at(SysState{3, 1, 0}) == DecisionProbs{0, 0, 0, 1});
    CHECK(greedy.at(SysState{2, 0, 0}) == DecisionProbs{0, 0, 1, 0});
    CHECK(greedy.at(SysState{1, 0, 0}) == DecisionProbs{0, 1, 0, 0});
    CHECK(greedy.at(SysState{4, 0, 7}) == DecisionProbs{0, 1, 0, 0});
    CHECK(greedy.at(SysState{4, 1, 0}) == DecisionProbs{1, 0, 0, 0});
    CHECK(greedy.at(SysState{0, 0, 0}) == DecisionProbs{0, 0, 0, 1});
    CHECK(local.at(SysState{0, 0, 0}) == DecisionProbs{0, 0, 0, 1});
}

TEST_CASE("single queued task under greedy goes local when the CPU is no slower") {
    SystemParams p = test::reference_params(0.2, 10);
    p.local_slots = 3;  // t_c = 3.5 > 3
    CHECK(make_baseline("greedy", p).at(SysState{1, 0, 0}) == DecisionProbs{1, 0, 0, 0});
    p.beta = 0.5;  // t_c = 3 = N: tie goes local
    CHECK(make_baseline("greedy", p).at(SysState{1, 0, 0}) == DecisionProbs{1, 0, 0, 0});
    p.local_slots = 4;
    CHECK(make_baseline("greedy", p).at(SysState{1, 0, 0}) == DecisionProbs{0, 1, 0, 0});
}

TEST_CASE("sending a lone task to the cloud beats the CPU at moderate load") {
    const SystemParams p = test::reference_params(0.2);
    const Policy greedy = make_baseline("greedy", p);
    Policy variant = greedy;
    variant.set(SysState{1, 0, 0}, {1, 0, 0, 0});

    const Metrics a = evaluate(greedy, p);
    const Metrics b = evaluate(variant, p);
    CHECK(a.t_bar < b.t_bar);

    SimConfig cfg;
    cfg.slots = 1'000'000;
    cfg.seed = 5;
    const SimReport sa = simulate(greedy, p, cfg);
    const SimReport sb = simulate(variant, p, cfg);
    CHECK(sa.mean_delay + sa.delay_half_width < sb.mean_delay - sb.delay_half_width);
}

TEST_CASE("unknown baseline name") {
    CHECK_THROWS_AS(make_baseline("fastest", test::reference_params(0.2)), InvalidArgument);
    CHECK(parse_baseline("cloud") == Baseline::cloud);
    CHECK(to_string(Baseline::greedy) == "greedy");
}

TEST_CASE("every baseline is valid over a range of parameters") {
    for (int q : {1, 2, 5})
        for (int m : {1, 2, 4})
            for (int n : {1, 3, 17})
                for (double beta : {0.1, 0.4, 1.0}) {
                    SystemParams p = test::reference_params(0.3, q);
                    p.packets_per_task = m;
                    p.local_slots = n;
                    p.beta = beta;
                    for (const char* name : {"local", "cloud", "greedy"})
                        CHECK(validate(make_baseline(name, p), p).empty());
                }
}

TEST_CASE("validation reports each kind of violation") {
    const SystemParams p = test::reference_params(0.2, 5);
    Policy pol = make_baseline("local", p);
    const StateSpace& sp = pol.space();

    pol.set(SysState{0, 0, 0}, {0.5, 0, 0, 0.5});
    auto v = validate(pol, p);
    CHECK(has(v, sp.index({0, 0, 0}), PolicyViolation::Kind::infeasible, 1));

    pol = make_baseline("local", p);
    pol.set(SysState{3, 0, 0}, {0.5, 0.2, 0.1, 0.1});
    v = validate(pol, p);
    REQUIRE(v.size() == 1);
    CHECK(has(v, sp.index({3, 0, 0}), PolicyViolation::Kind::normalization, 0));
    CHECK(describe(v[0], sp).find("(3,0,0)") != std::string::npos);

    pol.set(SysState{3, 0, 0}, {-0.1, 0.6, 0.0, 0.5});
    v = validate(pol, p);
    CHECK(has(v, sp.index({3, 0, 0}), PolicyViolation::Kind::negative, 1));

    CHECK_FALSE(validate(Policy(StateSpace(2, 1, 1)), p).empty());
}

TEST_CASE("policy CSV round trip") {
    const SystemParams p = test::tiny_params();
    Policy pol = make_baseline("greedy", p);
    pol.set(SysState{2, 0, 0}, {0.1, 0.2, 0.3 + 1e-17, 0.4});
    std::ostringstream os;
    write_policy_csv(os, pol);
    std::istringstream is(os.str());
    const Policy back = read_policy_csv(is, p);
    for (StateIndex i = 0; i < pol.size(); ++i) CHECK(back.at(i) == pol.at(i));
    CHECK(os.str().rfind("q,c_t,c_l,g1,g2,g3,g4\n", 0) == 0);
}

TEST_CASE("policy CSV errors") {
    const SystemParams p = test::tiny_params();
    auto read = [&](const std::string& text) {
        std::istringstream is(text);
        return read_policy_csv(is, p);
    };
    CHECK_THROWS_AS(read("a,b\n"), ParseError);
    CHECK_THROWS_AS(read("q,c_t,c_l,g1,g2,g3,g4\n0,0,0,0,0,0\n"), ParseError);
    CHECK_THROWS_AS(read("q,c_t,c_l,g1,g2,g3,g4\n9,0,0,0,0,0,1\n"), ParseError);
    CHECK_THROWS_AS(read("q,c_t,c_l,g1,g2,g3,g4\n0,0,0,0,0,0,x\n"), ParseError);
    CHECK_THROWS_AS(read("q,c_t,c_l,g1,g2,g3,g4\n0,0,0,0,0,0,1\n0,0,0,0,0,0,1\n"), ParseError);
    CHECK_THROWS(read("q,c_t,c_l,g1,g2,g3,g4\n0,0,0,0,0,0,1\n"));
}
