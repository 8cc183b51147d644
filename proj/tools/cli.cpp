#include "cli.hpp"

#include "mec/analysis.hpp"
#include "mec/chain.hpp"
#include "mec/config.hpp"
#include "mec/error.hpp"
#include "mec/lp.hpp"
#include "mec/policy.hpp"
#include "mec/sim.hpp"
#include "mec/synth.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

namespace mec::cli {

namespace {

using nlohmann::ordered_json;

constexpr const char* kPolicyNames[] = {"local", "cloud", "greedy", "optimal"};

bool known_policy(const std::string& name) {
    return std::find(std::begin(kPolicyNames), std::end(kPolicyNames), name) != std::end(kPolicyNames);
}

struct Common {
    std::string config;
    std::optional<double> alpha;
    std::optional<double> pmax;
    std::optional<int> buffer_cap;
    std::string out;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, Common& c, bool with_format) {
    cmd->add_option("--config", c.config, "configuration file")->required();
    cmd->add_option("--alpha", c.alpha, "override the arrival probability");
    cmd->add_option("--pmax", c.pmax, "override the average power budget (W)");
    cmd->add_option("--buffer-cap", c.buffer_cap, "override the buffer capacity Q");
    cmd->add_option("--out", c.out, "write the main output here instead of stdout");
    if (with_format)
        cmd->add_option("--format", c.format, "output format")->check(CLI::IsMember({"csv", "json"}));
}

SystemParams load_params(const Common& c) {
    SystemParams p = load_config(c.config).params;
    if (c.alpha) p.alpha = *c.alpha;
    if (c.pmax) p.p_max = *c.pmax;
    if (c.buffer_cap) p.buffer_cap = *c.buffer_cap;
    p.validate();
    return p;
}

void emit(const std::string& path, std::ostream& fallback, const std::function<void(std::ostream&)>& write) {
    if (path.empty()) {
        write(fallback);
        return;
    }
    std::ofstream file(path);
    if (!file) throw InvalidArgument("cannot open '" + path + "' for writing");
    write(file);
    if (!file) throw InvalidArgument("failed writing '" + path + "'");
}

struct Resolved {
    Policy policy;
    std::string name;
    std::optional<SynthesisResult> synthesis;
};

SearchOptions search_options(int grid, bool refine) {
    SearchOptions opt;
    opt.grid = grid;
    opt.refine = refine;
    return opt;
}

Resolved resolve_policy(const std::string& which, const SystemParams& p, const SearchOptions& opt) {
    Resolved r;
    if (which == "optimal") {
        r.synthesis = search_optimal(p, opt);
        r.policy = r.synthesis->policy;
        r.name = "optimal";
        return r;
    }
    if (known_policy(which)) {
        r.policy = make_baseline(which, p);
        r.name = which;
        return r;
    }
    std::ifstream file(which);
    if (!file) throw InvalidArgument("'" + which + "' is neither a policy name nor a readable policy file");
    r.policy = read_policy_csv(file, p);
    const auto violations = validate(r.policy, p);
    if (!violations.empty())
        throw InvalidArgument("policy file '" + which + "': " + describe(violations.front(), r.policy.space()) +
                              (violations.size() > 1 ? " (and " + std::to_string(violations.size() - 1) + " more)" : ""));
    r.name = "file";
    return r;
}

ordered_json metrics_json(const SystemParams& p, const std::string& name, const Metrics& m) {
    const double ms = p.slot_len * 1e3;
    ordered_json j;
    j["alpha"] = p.alpha;
    j["beta"] = p.beta;
    j["policy_name"] = name;
    j["t_q"] = m.t_q;
    j["eta"] = m.eta;
    j["t_p"] = m.t_p;
    j["t_bar"] = m.t_bar;
    j["nu_loc"] = m.nu_loc;
    j["nu_tx"] = m.nu_tx;
    j["p_bar"] = m.p_bar;
    j["overflow_mass"] = m.overflow_mass;
    j["t_q_ms"] = m.t_q * ms;
    j["t_p_ms"] = m.t_p * ms;
    j["t_bar_ms"] = m.t_bar * ms;
    j["valid"] = m.valid();
    return j;
}

// ---------------------------------------------------------------- derive

int cmd_derive(const Common& c, std::ostream& out) {
    const SystemParams p = load_params(c);
    const double t_tx = transmission_time(p);
    const double t_c = cloud_time(p);
    emit(c.out, out, [&](std::ostream& os) {
        if (c.format == "json") {
            ordered_json j;
            j["alpha"] = p.alpha;
            j["beta"] = p.beta;
            j["slot_len"] = p.slot_len;
            j["buffer_cap"] = p.buffer_cap;
            j["packets_per_task"] = p.packets_per_task;
            j["local_slots"] = p.local_slots;
            j["cloud_slots"] = p.cloud_slots;
            j["feedback_slots"] = p.feedback_slots;
            j["p_loc"] = p.p_loc;
            j["p_tx"] = p.p_tx;
            j["p_max"] = p.p_max;
            j["t_tx"] = t_tx;
            j["t_c"] = t_c;
            os << j.dump(2) << '\n';
            return;
        }
        auto line = [&os](const char* key, double v) { os << key << " = " << format_number(v) << '\n'; };
        line("alpha", p.alpha);
        line("beta", p.beta);
        line("slot_len", p.slot_len);
        line("buffer_cap", p.buffer_cap);
        line("packets_per_task", p.packets_per_task);
        line("local_slots", p.local_slots);
        line("cloud_slots", p.cloud_slots);
        line("feedback_slots", p.feedback_slots);
        line("p_loc", p.p_loc);
        line("p_tx", p.p_tx);
        line("p_max", p.p_max);
        line("t_tx", t_tx);
        line("t_c", t_c);
    });
    return ok;
}

// ---------------------------------------------------------------- evaluate

struct EvaluateArgs {
    std::string policy;
    int grid = 100;
    bool refine = false;
    std::string dump_kernel;
    std::string dump_steady;
};

int cmd_evaluate(const Common& c, const EvaluateArgs& a, std::ostream& out) {
    const SystemParams p = load_params(c);
    const Resolved r = resolve_policy(a.policy, p, search_options(a.grid, a.refine));
    const DecisionKernel kernel(p);
    const Metrics m = evaluate(r.policy, p, kernel);

    if (!a.dump_kernel.empty())
        emit(a.dump_kernel, out, [&](std::ostream& os) { write_matrix(os, policy_kernel(kernel, r.policy)); });
    if (!a.dump_steady.empty())
        emit(a.dump_steady, out, [&](std::ostream& os) {
            const StateSpace space(p);
            os << "q,c_t,c_l,pi\n";
            for (StateIndex i = 0; i < space.size(); ++i) {
                const SysState s = space.state(i);
                os << s.q << ',' << s.c_t << ',' << s.c_l << ',' << format_number(m.pi(static_cast<Eigen::Index>(i)))
                   << '\n';
            }
        });

    emit(c.out, out, [&](std::ostream& os) {
        if (c.format == "json") {
            ordered_json j = metrics_json(p, r.name, m);
            if (r.synthesis) j["eta_star"] = r.synthesis->eta_star;
            os << j.dump(2) << '\n';
        } else {
            os << metrics_csv_header() << '\n' << metrics_csv_row(p, r.name, m) << '\n';
        }
    });
    return m.valid() ? ok : invalid;
}

// ---------------------------------------------------------------- optimize

struct OptimizeArgs {
    int grid = 100;
    bool refine = false;
    std::string trace;
    std::string mps;
};

int cmd_optimize(const Common& c, const OptimizeArgs& a, std::ostream& out, std::ostream& err) {
    const SystemParams p = load_params(c);
    const SynthesisResult r = search_optimal(p, search_options(a.grid, a.refine));

    emit(c.out, out, [&](std::ostream& os) { write_policy_csv(os, r.policy); });
    if (!a.trace.empty()) emit(a.trace, out, [&](std::ostream& os) { write_trace_csv(os, r.trace); });
    if (!a.mps.empty())
        emit(a.mps, out, [&](std::ostream& os) { lp::write_mps(os, build_p2(p, r.eta_star).problem); });

    const double ms = p.slot_len * 1e3;
    err << "eta_star=" << format_number(r.eta_star) << " t_bar_star=" << format_number(r.t_bar_star)
        << " slots (" << format_number(r.t_bar_star * ms) << " ms) p_bar=" << format_number(r.metrics.p_bar)
        << " overflow_mass=" << format_number(r.metrics.overflow_mass) << '\n';
    return r.metrics.valid() ? ok : invalid;
}

// ---------------------------------------------------------------- sweep

struct SweepArgs {
    SweepSpec spec;
    std::string policies = "local,cloud,greedy,optimal";
    unsigned jobs = 1;
};

std::vector<std::string> split_names(const std::string& list) {
    std::vector<std::string> names;
    std::stringstream ss(list);
    std::string item;
    while (std::getline(ss, item, ','))
        if (!item.empty()) names.push_back(item);
    return names;
}

struct SweepRow {
    std::string text;
    bool clean = true;
};

std::string csv_safe(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

SweepRow sweep_row(const SystemParams& p, const std::string& name, const SearchOptions& opt) {
    SweepRow row;
    try {
        const Resolved r = resolve_policy(name, p, opt);
        const Metrics m = r.synthesis ? r.synthesis->metrics : evaluate(r.policy, p);
        row.clean = m.valid();
        row.text = metrics_csv_row(p, name, m) + ',' + (r.synthesis ? format_number(r.synthesis->eta_star) : "") +
                   ',' + (m.valid() ? "ok" : "overflow") + ',';
    } catch (const Error& e) {
        row.clean = false;
        row.text = format_number(p.alpha) + ',' + format_number(p.beta) + ',' + name;
        for (int i = 0; i < 11; ++i) row.text += ',';
        row.text += ",0,,error," + csv_safe(e.what());
    }
    return row;
}

int cmd_sweep(const Common& c, SweepArgs& a, std::ostream& out) {
    a.spec.policies = split_names(a.policies);
    a.spec.validate();
    const SystemParams base = load_params(c);
    const std::vector<double> alphas = a.spec.alphas();
    const std::size_t per_alpha = a.spec.policies.size();
    std::vector<SweepRow> rows(alphas.size() * per_alpha);

    auto work = [&](std::size_t i) {
        SystemParams p = base;
        p.alpha = alphas[i];
        for (std::size_t k = 0; k < per_alpha; ++k)
            rows[i * per_alpha + k] =
                sweep_row(p, a.spec.policies[k], search_options(a.spec.grid, a.spec.refine));
    };

    const unsigned jobs = std::max(1u, std::min<unsigned>(a.jobs, static_cast<unsigned>(alphas.size())));
    if (jobs == 1) {
        for (std::size_t i = 0; i < alphas.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < jobs; ++t)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < alphas.size(); i = next++) work(i);
            });
        for (auto& t : pool) t.join();
    }

    bool clean = true;
    emit(c.out, out, [&](std::ostream& os) {
        os << metrics_csv_header() << ",eta_star,status,message\n";
        for (const SweepRow& r : rows) {
            os << r.text << '\n';
            clean = clean && r.clean;
        }
    });
    return clean ? ok : invalid;
}

// ---------------------------------------------------------------- simulate

struct SimulateArgs {
    std::string policy;
    int grid = 100;
    bool refine = false;
    std::uint64_t slots = 1'000'000;
    std::optional<std::uint64_t> warmup;
    std::uint64_t seed = 1;
    std::string trace;
};

int cmd_simulate(const Common& c, const SimulateArgs& a, std::ostream& out) {
    const SystemParams p = load_params(c);
    SimConfig cfg;
    cfg.slots = a.slots;
    cfg.warmup = a.warmup;
    cfg.seed = a.seed;
    cfg.validate();
    const Resolved r = resolve_policy(a.policy, p, search_options(a.grid, a.refine));

    std::vector<TaskRecord> tasks;
    const SimReport rep = simulate(r.policy, p, cfg, a.trace.empty() ? nullptr : &tasks);
    if (!a.trace.empty()) emit(a.trace, out, [&](std::ostream& os) { write_task_trace_csv(os, tasks); });

    const std::vector<std::pair<const char*, double>> reals{
        {"mean_delay", rep.mean_delay},         {"delay_half_width", rep.delay_half_width},
        {"mean_wait", rep.mean_wait},           {"wait_half_width", rep.wait_half_width},
        {"mean_queue_len", rep.mean_queue_len}, {"local_fraction", rep.local_fraction},
        {"local_fraction_half_width", rep.local_fraction_half_width},
        {"mean_power", rep.mean_power},         {"power_half_width", rep.power_half_width}};
    const std::vector<std::pair<const char*, std::uint64_t>> counts{
        {"arrivals", rep.arrivals},
        {"completed_tasks", rep.completed_tasks},
        {"incomplete_tasks", rep.incomplete_tasks},
        {"dropped_tasks", rep.dropped_tasks},
        {"measured_slots", rep.measured_slots}};

    emit(c.out, out, [&](std::ostream& os) {
        if (c.format == "json") {
            ordered_json j;
            j["alpha"] = p.alpha;
            j["beta"] = p.beta;
            j["policy_name"] = r.name;
            j["slots"] = cfg.slots;
            j["warmup"] = cfg.warmup_slots();
            j["seed"] = cfg.seed;
            for (const auto& [k, v] : reals) j[k] = v;
            for (const auto& [k, v] : counts) j[k] = v;
            os << j.dump(2) << '\n';
            return;
        }
        os << "alpha,beta,policy_name,slots,warmup,seed";
        for (const auto& kv : reals) os << ',' << kv.first;
        for (const auto& kv : counts) os << ',' << kv.first;
        os << '\n'
           << format_number(p.alpha) << ',' << format_number(p.beta) << ',' << r.name << ',' << cfg.slots << ','
           << cfg.warmup_slots() << ',' << cfg.seed;
        for (const auto& kv : reals) os << ',' << format_number(kv.second);
        for (const auto& kv : counts) os << ',' << kv.second;
        os << '\n';
    });
    return rep.dropped_tasks == 0 ? ok : invalid;
}

} // namespace

void SweepSpec::validate() const {
    if (!(alpha_start > 0.0 && alpha_start <= alpha_end && alpha_end <= 1.0))
        throw InvalidArgument("alpha range must satisfy 0 < start <= end <= 1");
    if (!(alpha_step > 0.0)) throw InvalidArgument("alpha step must be positive");
    if (grid < 1) throw InvalidArgument("grid size J must be at least 1");
    if (policies.empty()) throw InvalidArgument("no policies requested");
    for (const auto& name : policies)
        if (!known_policy(name)) throw InvalidArgument("unknown policy '" + name + "'");
}

std::vector<double> SweepSpec::alphas() const {
    std::vector<double> out;
    for (long i = 0;; ++i) {
        const double a = alpha_start + static_cast<double>(i) * alpha_step;
        if (a > alpha_end + 1e-9 * std::max(1.0, alpha_step)) break;
        out.push_back(std::stod(format_number(a)));
    }
    return out;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay-optimal task scheduling for a mobile device with an edge server"};
    app.name("mecsched");
    app.require_subcommand(1);

    Common common;

    auto* derive = app.add_subcommand("derive", "print the slot-level constants of a configuration");
    add_common(derive, common, true);

    EvaluateArgs eval_args;
    auto* eval = app.add_subcommand("evaluate", "closed-form metrics of one policy");
    add_common(eval, common, true);
    eval->add_option("--policy", eval_args.policy, "local | cloud | greedy | optimal | policy CSV path")->required();
    eval->add_option("--grid", eval_args.grid, "eta grid size J when --policy optimal");
    eval->add_flag("--refine", eval_args.refine, "refine eta between grid points when --policy optimal");
    eval->add_option("--dump-kernel", eval_args.dump_kernel, "write the policy transition matrix (row col probability per line)");
    eval->add_option("--dump-steady", eval_args.dump_steady, "write the steady-state distribution");

    OptimizeArgs opt_args;
    auto* optimize = app.add_subcommand("optimize", "synthesize the delay-optimal policy");
    add_common(optimize, common, false);
    optimize->add_option("--grid", opt_args.grid, "eta grid size J");
    optimize->add_flag("--refine", opt_args.refine, "refine eta between the grid neighbours of the grid optimum");
    optimize->add_option("--trace", opt_args.trace, "write the per-eta search trace CSV");
    optimize->add_option("--mps", opt_args.mps, "write the linear program at the chosen eta in MPS format");

    SweepArgs sweep_args;
    auto* sweep = app.add_subcommand("sweep", "metrics over a range of arrival probabilities");
    add_common(sweep, common, false);
    sweep->add_option("--alpha-start", sweep_args.spec.alpha_start, "first alpha");
    sweep->add_option("--alpha-end", sweep_args.spec.alpha_end, "last alpha (inclusive)");
    sweep->add_option("--alpha-step", sweep_args.spec.alpha_step, "alpha increment");
    sweep->add_option("--policies", sweep_args.policies, "comma-separated subset of local,cloud,greedy,optimal");
    sweep->add_option("--grid", sweep_args.spec.grid, "eta grid size J");
    sweep->add_flag("--refine", sweep_args.spec.refine, "refine eta between grid points for the optimal policy");
    sweep->add_option("--jobs", sweep_args.jobs, "alpha points processed in parallel");

    SimulateArgs sim_args;
    auto* sim = app.add_subcommand("simulate", "slot-level Monte Carlo run of one policy");
    add_common(sim, common, true);
    sim->add_option("--policy", sim_args.policy, "local | cloud | greedy | optimal | policy CSV path")->required();
    sim->add_option("--grid", sim_args.grid, "eta grid size J when --policy optimal");
    sim->add_flag("--refine", sim_args.refine, "refine eta between grid points when --policy optimal");
    sim->add_option("--slots", sim_args.slots, "horizon in slots");
    sim->add_option("--warmup", sim_args.warmup, "slots discarded before measuring (default 10% of the horizon)");
    sim->add_option("--seed", sim_args.seed, "random seed");
    sim->add_option("--trace", sim_args.trace, "write every measured task to this CSV");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return failure;
    }

    try {
        if (*derive) return cmd_derive(common, out);
        if (*eval) return cmd_evaluate(common, eval_args, out);
        if (*optimize) return cmd_optimize(common, opt_args, out, err);
        if (*sweep) return cmd_sweep(common, sweep_args, out);
        if (*sim) return cmd_simulate(common, sim_args, out);
    } catch (const ParseError& e) {
        err << "error: " << common.config << ": " << e.what() << '\n';
        return failure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}

} // namespace mec::cli
