#include "mec/synth.hpp"

#include "mec/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <ostream>

namespace mec {

double OccupationMeasure::total() const {
    double s = 0.0;
    for (const auto& row : x_)
        for (double v : row) s += v;
    return s;
}

Eigen::VectorXd OccupationMeasure::state_marginal() const {
    Eigen::VectorXd pi(static_cast<Eigen::Index>(x_.size()));
    for (std::size_t i = 0; i < x_.size(); ++i)
        pi(static_cast<Eigen::Index>(i)) = x_[i][0] + x_[i][1] + x_[i][2] + x_[i][3];
    return pi;
}

namespace {

/// Coefficient of x^k in Gamma(x, eta); S1, S2, S3 are exactly the states
/// where decisions local, cloud and both are feasible.
double gamma_coefficient(Decision k, double eta) {
    switch (k) {
    case Decision::local: return 1.0 - eta;
    case Decision::cloud: return -eta;
    case Decision::both: return 1.0 - 2.0 * eta;
    case Decision::idle: return 0.0;
    }
    return 0.0;
}

double power_coefficient(const SysState& s, Decision k, const SystemParams& p) {
    const UnitActivity act = unit_activity(s, k);
    return (act.cpu ? p.p_loc : 0.0) + (act.tx ? p.beta * p.p_tx : 0.0);
}

} // namespace

P2Instance build_p2(const SystemParams& p, double eta, const DecisionKernel& kernel) {
    p.validate();
    if (!(p.alpha > 0.0)) throw UndefinedDelay("P2 needs alpha > 0");
    if (!(eta >= 0.0 && eta <= 1.0)) throw InvalidArgument("eta must lie in [0,1]");

    const StateSpace& space = kernel.space();
    const auto states = static_cast<Eigen::Index>(space.size());
    P2Instance inst;
    inst.eta = eta;
    inst.space = space;
    inst.constant = eta * p.local_slots + (1.0 - eta) * cloud_time(p);

    for (StateIndex i = 0; i < space.size(); ++i)
        for (Decision k : all_decisions)
            if (kernel.has(i, k)) inst.vars.emplace_back(i, k);

    const auto nx = static_cast<Eigen::Index>(inst.vars.size());
    inst.slack = nx;
    const Eigen::Index rows = 2 + (states - 1) + 1;
    const Eigen::Index norm_row = rows - 1;
    const StateIndex dropped = space.size() - 1;
    auto balance_row = [](StateIndex s) { return static_cast<Eigen::Index>(2 + s); };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nx) * 8);
    inst.problem.cost = Eigen::VectorXd::Zero(nx + 1);

    for (Eigen::Index c = 0; c < nx; ++c) {
        const auto [s, k] = inst.vars[static_cast<std::size_t>(c)];
        const SysState st = space.state(s);
        inst.problem.cost(c) = st.q / p.alpha;

        const double pw = power_coefficient(st, k, p);
        if (pw != 0.0) trip.emplace_back(P2Instance::power_row, c, pw);
        const double gm = gamma_coefficient(k, eta);
        if (gm != 0.0) trip.emplace_back(P2Instance::gamma_row, c, gm);

        // F_tau: inflow from this column minus its own outflow
        double self = -1.0;
        for (const Transition& t : kernel.row(s, k)) {
            if (t.to == s)
                self += t.prob;
            else if (t.to != dropped)
                trip.emplace_back(balance_row(t.to), c, t.prob);
        }
        if (s != dropped && self != 0.0) trip.emplace_back(balance_row(s), c, self);

        trip.emplace_back(norm_row, c, 1.0);
    }
    trip.emplace_back(P2Instance::power_row, nx, 1.0);

    inst.problem.a.resize(rows, nx + 1);
    inst.problem.a.setFromTriplets(trip.begin(), trip.end());
    inst.problem.a.makeCompressed();
    inst.problem.rhs = Eigen::VectorXd::Zero(rows);
    inst.problem.rhs(P2Instance::power_row) = p.p_max;
    inst.problem.rhs(norm_row) = 1.0;
    return inst;
}

P2Instance build_p2(const SystemParams& p, double eta) { return build_p2(p, eta, DecisionKernel(p)); }

lp::Basis idle_basis(const P2Instance& inst) {
    lp::Basis basis(static_cast<std::size_t>(inst.problem.rows()), -1);
    basis[P2Instance::power_row] = inst.slack;
    const StateIndex last = inst.space.size() - 1;
    for (std::size_t c = 0; c < inst.vars.size(); ++c) {
        const auto [s, k] = inst.vars[c];
        if (k != Decision::idle) continue;
        const Eigen::Index row = s == last ? inst.problem.rows() - 1 : static_cast<Eigen::Index>(2 + s);
        basis[static_cast<std::size_t>(row)] = static_cast<Eigen::Index>(c);
    }
    return basis;
}

OccupationMeasure occupation_from(const P2Instance& inst, const Eigen::VectorXd& x) {
    OccupationMeasure occ(inst.space);
    for (std::size_t c = 0; c < inst.vars.size(); ++c) {
        const auto [s, k] = inst.vars[c];
        occ.at(s, k) = std::max(0.0, x(static_cast<Eigen::Index>(c)));
    }
    return occ;
}

Policy recover_policy(const OccupationMeasure& x) {
    const StateSpace& space = x.space();
    Policy policy(space);
    for (int c_t = 0; c_t <= space.packets_per_task(); ++c_t)
        for (int c_l = 0; c_l < space.local_slots(); ++c_l) {
            std::optional<DecisionProbs> donor;
            for (int q = 0; q <= space.buffer_cap(); ++q) {
                const StateIndex i = space.index({q, c_t, c_l});
                const DecisionProbs& row = x.at(i);
                const double mass = row[0] + row[1] + row[2] + row[3];
                if (mass > kMassFloor) {
                    const DecisionProbs g{row[0] / mass, row[1] / mass, row[2] / mass, row[3] / mass};
                    policy.set(i, g);
                    if (g[3] < 1.0) donor = g;
                } else if (donor) {
                    policy.set(i, *donor);
                }
            }
        }
    return policy;
}

double balance_residual(const OccupationMeasure& x, const DecisionKernel& kernel) {
    const StateSpace& space = kernel.space();
    Eigen::VectorXd flow = -x.state_marginal();
    for (StateIndex i = 0; i < space.size(); ++i)
        for (Decision k : all_decisions) {
            const double v = x.at(i, k);
            if (v == 0.0) continue;
            for (const Transition& t : kernel.row(i, k)) flow(static_cast<Eigen::Index>(t.to)) += v * t.prob;
        }
    return flow.lpNorm<Eigen::Infinity>();
}

double local_fraction_gap(const OccupationMeasure& x, double eta) {
    double g = 0.0;
    for (StateIndex i = 0; i < x.space().size(); ++i)
        for (Decision k : {Decision::local, Decision::cloud, Decision::both})
            g += gamma_coefficient(k, eta) * x.at(i, k);
    return g;
}

double occupation_power(const OccupationMeasure& x, const SystemParams& p) {
    double w = 0.0;
    for (StateIndex i = 0; i < x.space().size(); ++i) {
        const SysState s = x.space().state(i);
        for (Decision k : all_decisions) w += power_coefficient(s, k, p) * x.at(i, k);
    }
    return w;
}

double occupation_delay(const OccupationMeasure& x, const SystemParams& p, double eta) {
    double mean_q = 0.0;
    for (StateIndex i = 0; i < x.space().size(); ++i) {
        const DecisionProbs& row = x.at(i);
        mean_q += x.space().state(i).q * (row[0] + row[1] + row[2] + row[3]);
    }
    return mean_q / p.alpha + eta * p.local_slots + (1.0 - eta) * cloud_time(p);
}

double start_rate(const OccupationMeasure& x) {
    double r = 0.0;
    for (StateIndex i = 0; i < x.space().size(); ++i) {
        const DecisionProbs& row = x.at(i);
        r += row[0] + row[1] + 2.0 * row[2];
    }
    return r;
}

std::string_view to_string(GridStatus s) {
    switch (s) {
    case GridStatus::optimal: return "optimal";
    case GridStatus::infeasible: return "infeasible";
    case GridStatus::unbounded: return "unbounded";
    case GridStatus::no_throughput: return "no_throughput";
    }
    return "?";
}

namespace {

struct PointResult {
    GridPoint point;
    Eigen::VectorXd x;
    lp::Basis basis;
};

PointResult solve_point(const SystemParams& p, const DecisionKernel& kernel, double eta,
                        const lp::Options& lp_opt, const PointResult* warm) {
    PointResult out;
    const P2Instance inst = build_p2(p, eta, kernel);
    std::vector<lp::Basis> hints;
    if (warm && !warm->basis.empty()) hints.push_back(warm->basis);
    hints.push_back(idle_basis(inst));
    const lp::Solution sol = lp::solve(inst.problem, lp_opt, hints);
    out.basis = sol.basis;
    out.point.eta = eta;
    out.point.iterations = sol.iterations;
    switch (sol.status) {
    case lp::Status::infeasible: out.point.status = GridStatus::infeasible; return out;
    case lp::Status::unbounded: out.point.status = GridStatus::unbounded; return out;
    case lp::Status::optimal: break;
    }
    out.x = sol.x;
    // a budget that only admits never scheduling anything leaves eta meaningless
    if (start_rate(occupation_from(inst, sol.x)) <= 1e-12) {
        out.point.status = GridStatus::no_throughput;
        return out;
    }
    out.point.status = GridStatus::optimal;
    out.point.t_bar = sol.objective + inst.constant;
    return out;
}

/// Golden-section search for the minimum of T'(eta) between the grid
/// neighbours of the grid winner.
PointResult refine_point(const SystemParams& p, const DecisionKernel& kernel,
                         const std::vector<PointResult>& points, int best, const SearchOptions& options) {
    const int grid = options.grid;
    double lo = static_cast<double>(std::max(best - 1, 0)) / grid;
    double hi = static_cast<double>(std::min(best + 1, grid)) / grid;
    PointResult top = points[static_cast<std::size_t>(best)];

    auto value = [](const PointResult& r) {
        return r.point.status == GridStatus::optimal ? r.point.t_bar : std::numeric_limits<double>::infinity();
    };
    auto probe = [&](double eta) {
        PointResult r = solve_point(p, kernel, eta, options.lp, &top);
        if (value(r) < value(top)) top = r;
        return value(r);
    };

    const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = hi - ratio * (hi - lo), d = lo + ratio * (hi - lo);
    double fc = probe(c), fd = probe(d);
    while (hi - lo > options.refine_tol) {
        if (fc <= fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - ratio * (hi - lo);
            fc = probe(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + ratio * (hi - lo);
            fd = probe(d);
        }
    }
    return top;
}

} // namespace

SynthesisResult search_optimal(const SystemParams& p, const SearchOptions& options) {
    p.validate();
    if (options.grid < 1) throw InvalidArgument("grid size J must be at least 1");
    if (!(p.alpha > 0.0)) throw UndefinedDelay("synthesis needs alpha > 0");

    const DecisionKernel kernel(p);
    const int grid = options.grid;
    std::vector<PointResult> points(static_cast<std::size_t>(grid + 1));

    const PointResult* warm = nullptr;
    for (int j = 0; j <= grid; ++j) {
        PointResult& pt = points[static_cast<std::size_t>(j)];
        pt = solve_point(p, kernel, static_cast<double>(j) / grid, options.lp, warm);
        if (options.warm_start && !pt.basis.empty()) warm = &pt;
    }

    SynthesisResult result;
    int best = -1;
    for (int j = 0; j <= grid; ++j) {
        const GridPoint& gp = points[static_cast<std::size_t>(j)].point;
        result.trace.push_back(gp);
        if (gp.status != GridStatus::optimal) continue;
        if (best < 0 || gp.t_bar < points[static_cast<std::size_t>(best)].point.t_bar) best = j;
    }
    if (best < 0)
        throw SynthesisInfeasible("no eta grid point admits a schedulable solution "
                                  "(power budget too tight or arrival rate too high for the buffer)");

    std::vector<const PointResult*> candidates;
    PointResult refined;
    if (options.refine) {
        refined = refine_point(p, kernel, points, best, options);
        if (refined.point.t_bar < points[static_cast<std::size_t>(best)].point.t_bar) candidates.push_back(&refined);
    }
    candidates.push_back(&points[static_cast<std::size_t>(best)]);

    // an off-grid vertex may mix recurrent classes; the grid winner is the fallback
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        const PointResult& win = *candidates[c];
        const P2Instance inst = build_p2(p, win.point.eta, kernel);
        result.eta_star = win.point.eta;
        result.t_bar_star = win.point.t_bar;
        result.refined = candidates[c] == &refined;
        result.occupation = occupation_from(inst, win.x);
        result.policy = recover_policy(result.occupation);

        result.metrics = evaluate(result.policy, p, kernel);
        const Eigen::VectorXd marginal = result.occupation.state_marginal();
        result.roundtrip_tv = 0.5 * (result.metrics.pi - marginal / marginal.sum()).lpNorm<1>();
        const bool last = c + 1 == candidates.size();
        if (!(result.roundtrip_tv <= 1e-6)) {
            if (!last) continue;
            throw NumericalFailure("recovered policy does not reproduce the occupation measure",
                                   result.roundtrip_tv);
        }
        if (!(result.metrics.p_bar <= p.p_max + 1e-6)) {
            if (!last) continue;
            throw NumericalFailure("recovered policy exceeds the power budget", result.metrics.p_bar - p.p_max);
        }
        break;
    }
    return result;
}

void write_trace_csv(std::ostream& os, const std::vector<GridPoint>& trace) {
    os << "eta,status,t_bar\n";
    for (const GridPoint& g : trace) {
        os << format_number(g.eta) << ',' << to_string(g.status) << ',';
        if (g.status == GridStatus::optimal) os << format_number(g.t_bar);
        os << '\n';
    }
}

} // namespace mec
