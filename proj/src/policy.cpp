#include "mec/policy.hpp"

#include "mec/error.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace mec {

Policy::Policy(const StateSpace& space)
    : space_(space), table_(space.size(), DecisionProbs{0.0, 0.0, 0.0, 1.0}) {}

Baseline parse_baseline(std::string_view name) {
    if (name == "local") return Baseline::local;
    if (name == "cloud") return Baseline::cloud;
    if (name == "greedy") return Baseline::greedy;
    throw InvalidArgument("unknown baseline policy '" + std::string(name) + "'");
}

std::string_view to_string(Baseline b) {
    switch (b) {
    case Baseline::local: return "local";
    case Baseline::cloud: return "cloud";
    case Baseline::greedy: return "greedy";
    }
    return "?";
}

namespace {

DecisionProbs only(Decision k) {
    DecisionProbs g{0.0, 0.0, 0.0, 0.0};
    g[slot_of(k)] = 1.0;
    return g;
}

Decision greedy_choice(const SysState& s, bool prefer_cloud) {
    const bool can_local = feasible(s, Decision::local);
    const bool can_cloud = feasible(s, Decision::cloud);
    if (feasible(s, Decision::both)) return Decision::both;
    if (can_local && can_cloud) return prefer_cloud ? Decision::cloud : Decision::local;
    if (can_local) return Decision::local;
    if (can_cloud) return Decision::cloud;
    return Decision::idle;
}

} // namespace

Policy make_baseline(Baseline which, const SystemParams& p) {
    p.validate();
    Policy policy{StateSpace(p)};
    // a single queued task goes to the unit that finishes it sooner; ties go local
    const bool prefer_cloud = cloud_time(p) < static_cast<double>(p.local_slots);
    for (StateIndex i = 0; i < policy.size(); ++i) {
        const SysState s = policy.space().state(i);
        Decision k = Decision::idle;
        switch (which) {
        case Baseline::local:
            if (feasible(s, Decision::local)) k = Decision::local;
            break;
        case Baseline::cloud:
            if (feasible(s, Decision::cloud)) k = Decision::cloud;
            break;
        case Baseline::greedy: k = greedy_choice(s, prefer_cloud); break;
        }
        policy.set(i, only(k));
    }
    return policy;
}

Policy make_baseline(std::string_view name, const SystemParams& p) {
    return make_baseline(parse_baseline(name), p);
}

std::vector<PolicyViolation> validate(const Policy& policy, const SystemParams& p) {
    std::vector<PolicyViolation> out;
    const StateSpace space(p);
    if (policy.size() != space.size()) {
        out.push_back({0, PolicyViolation::Kind::normalization, 0, static_cast<double>(policy.size())});
        return out;
    }
    for (StateIndex i = 0; i < space.size(); ++i) {
        const SysState s = space.state(i);
        const DecisionProbs& g = policy.at(i);
        double total = 0.0;
        for (Decision k : all_decisions) {
            const double v = g[slot_of(k)];
            const int kk = static_cast<int>(k);
            if (!(v >= 0.0))
                out.push_back({i, PolicyViolation::Kind::negative, kk, v});
            else if (v > 0.0 && !feasible(s, k))
                out.push_back({i, PolicyViolation::Kind::infeasible, kk, v});
            total += v;
        }
        if (!(std::abs(total - 1.0) <= 1e-12))
            out.push_back({i, PolicyViolation::Kind::normalization, 0, total});
    }
    return out;
}

std::string describe(const PolicyViolation& v, const StateSpace& space) {
    const SysState s = space.state(v.state);
    std::ostringstream os;
    os << "state (" << s.q << "," << s.c_t << "," << s.c_l << ")";
    switch (v.kind) {
    case PolicyViolation::Kind::negative: os << ": g" << v.decision << " is negative (" << v.value << ")"; break;
    case PolicyViolation::Kind::infeasible:
        os << ": g" << v.decision << " = " << v.value << " but the decision is infeasible";
        break;
    case PolicyViolation::Kind::normalization: os << ": probabilities sum to " << v.value; break;
    }
    return os.str();
}

void write_policy_csv(std::ostream& os, const Policy& policy) {
    os << "q,c_t,c_l,g1,g2,g3,g4\n";
    char buf[32];
    for (StateIndex i = 0; i < policy.size(); ++i) {
        const SysState s = policy.space().state(i);
        os << s.q << ',' << s.c_t << ',' << s.c_l;
        for (double g : policy.at(i)) {
            std::snprintf(buf, sizeof buf, "%.17g", g);
            os << ',' << buf;
        }
        os << '\n';
    }
}

Policy read_policy_csv(std::istream& is, const SystemParams& p) {
    const StateSpace space(p);
    Policy policy(space);
    std::vector<char> seen(space.size(), 0);
    std::string line;
    int lineno = 0;
    bool header = false;
    std::size_t rows = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (!header) {
            if (line != "q,c_t,c_l,g1,g2,g3,g4") throw ParseError("unexpected policy CSV header", lineno);
            header = true;
            continue;
        }
        std::istringstream row(line);
        std::string cell;
        std::array<std::string, 7> cells;
        std::size_t n = 0;
        while (std::getline(row, cell, ',')) {
            if (n == cells.size()) throw ParseError("too many columns", lineno);
            cells[n++] = cell;
        }
        if (n != cells.size()) throw ParseError("expected 7 columns", lineno);
        SysState s;
        DecisionProbs g{};
        try {
            std::size_t used = 0;
            auto as_int = [&](const std::string& c) {
                const int v = std::stoi(c, &used);
                if (used != c.size()) throw std::invalid_argument(c);
                return v;
            };
            auto as_double = [&](const std::string& c) {
                const double v = std::stod(c, &used);
                if (used != c.size()) throw std::invalid_argument(c);
                return v;
            };
            s = {as_int(cells[0]), as_int(cells[1]), as_int(cells[2])};
            for (std::size_t k = 0; k < 4; ++k) g[k] = as_double(cells[3 + k]);
        } catch (const std::logic_error&) {
            throw ParseError("malformed number", lineno);
        }
        if (!space.contains(s)) throw ParseError("state outside the state space", lineno);
        const StateIndex i = space.index(s);
        if (seen[i]) throw ParseError("duplicate state", lineno);
        seen[i] = 1;
        policy.set(i, g);
        ++rows;
    }
    if (!header) throw ParseError("empty policy file", 0);
    if (rows != space.size())
        throw ParseError("policy covers " + std::to_string(rows) + " of " +
                             std::to_string(space.size()) + " states",
                         0);
    return policy;
}

} // namespace mec
