#include "cli.hpp"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;

namespace {

const std::string kConfig = std::string(MEC_SOURCE_DIR) + "/configs/mec_default.conf";

struct Outcome {
    int code;
    std::string out;
    std::string err;
};

Outcome run(std::vector<std::string> args) {
    std::ostringstream out, err;
    const int code = mec::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch_dir() {
    const fs::path dir = fs::temp_directory_path() / "mecsched_cli_test";
    fs::create_directories(dir);
    return dir;
}

std::string write_file(const std::string& name, const std::string& text) {
    const fs::path path = scratch_dir() / name;
    std::ofstream(path) << text;
    return path.string();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string config_text() { return read_file(kConfig); }

std::vector<std::string> split(const std::string& line, char sep = ',') {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, sep)) cells.push_back(cell);
    if (!line.empty() && line.back() == sep) cells.emplace_back();
    return cells;
}

/// First data row of a two-line CSV as a header -> cell map.
std::map<std::string, std::string> csv_record(const std::string& text, std::size_t row = 1) {
    std::vector<std::string> lines;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) lines.push_back(line);
    REQUIRE(lines.size() > row);
    const auto head = split(lines[0]), cells = split(lines[row]);
    REQUIRE(head.size() == cells.size());
    std::map<std::string, std::string> rec;
    for (std::size_t i = 0; i < head.size(); ++i) rec[head[i]] = cells[i];
    return rec;
}

std::map<std::string, std::string> key_values(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) {
        const auto eq = line.find(" = ");
        if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 3);
    }
    return kv;
}

} // namespace

TEST_CASE("derive prints the reference constants") {
    const Outcome o = run({"derive", "--config", kConfig});
    REQUIRE(o.code == 0);
    const auto kv = key_values(o.out);
    CHECK(kv.at("local_slots") == "17");
    CHECK(kv.at("cloud_slots") == "1");
    CHECK(kv.at("t_tx") == "2.5");
    CHECK(kv.at("t_c") == "3.5");
    CHECK(kv.at("p_loc") == "0.8");
    CHECK(kv.at("beta") == "0.4");

    const Outcome j = run({"derive", "--config", kConfig, "--format", "json"});
    REQUIRE(j.code == 0);
    const auto doc = nlohmann::json::parse(j.out);
    CHECK(doc["local_slots"] == 17);
    CHECK(doc["t_c"].get<double>() == 3.5);
}

TEST_CASE("derive reports configuration problems") {
    std::string text = config_text();
    text.erase(text.find("alpha = 0.2\n"), 12);
    const Outcome missing = run({"derive", "--config", write_file("no_alpha.conf", text)});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("alpha") != std::string::npos);

    text = config_text();
    text.replace(text.find("f_loc = 2e9"), 11, "f_loc = 4e9");
    const Outcome fast = run({"derive", "--config", write_file("fast_cpu.conf", text)});
    REQUIRE(fast.code == 0);
    CHECK(key_values(fast.out).at("local_slots") == "9");

    const Outcome absent = run({"derive", "--config", "/nonexistent/x.conf"});
    CHECK(absent.code == 1);
    CHECK(absent.err.find("cannot open") != std::string::npos);
}

TEST_CASE("evaluate") {
    const Outcome cloud = run({"evaluate", "--config", kConfig, "--policy", "cloud"});
    REQUIRE(cloud.code == 0);
    auto rec = csv_record(cloud.out);
    CHECK(rec.at("eta") == "0");
    CHECK(rec.at("t_p") == "3.5");
    CHECK(rec.at("t_bar") == "6");
    CHECK(rec.at("valid") == "1");

    const Outcome local = run({"evaluate", "--config", kConfig, "--policy", "local"});
    CHECK(local.code == 2);
    CHECK(csv_record(local.out).at("valid") == "0");

    const Outcome greedy = run({"evaluate", "--config", kConfig, "--policy", "greedy", "--alpha", "0.3"});
    REQUIRE(greedy.code == 0);
    CHECK(std::isfinite(std::stod(csv_record(greedy.out).at("t_bar"))));

    const Outcome bad = run({"evaluate", "--config", kConfig, "--policy", "nonsense"});
    CHECK(bad.code == 1);
}

TEST_CASE("evaluate dumps the kernel and the steady state") {
    const std::string kernel = (scratch_dir() / "kernel.txt").string();
    const std::string steady = (scratch_dir() / "steady.csv").string();
    const Outcome o = run({"evaluate", "--config", kConfig, "--policy", "cloud", "--buffer-cap", "4",
                           "--dump-kernel", kernel, "--dump-steady", steady, "--format", "json"});
    // a four-task buffer overflows at the default load, which only flags the result
    REQUIRE(o.code == 2);
    CHECK(nlohmann::json::parse(o.out)["policy_name"] == "cloud");
    const std::string k = read_file(kernel);
    CHECK(k.rfind("0 0 0.8", 0) == 0);
    const std::string s = read_file(steady);
    CHECK(s.rfind("q,c_t,c_l,pi\n", 0) == 0);
    CHECK(std::count(s.begin(), s.end(), '\n') == 1 + 5 * 2 * 17);
}

TEST_CASE("optimize at light load keeps the trace minimum at zero") {
    const std::string trace = (scratch_dir() / "trace.csv").string();
    const std::string policy = (scratch_dir() / "policy.csv").string();
    const Outcome o = run({"optimize", "--config", kConfig, "--alpha", "0.05", "--trace", trace, "--out", policy});
    REQUIRE(o.code == 0);
    CHECK(o.err.find("eta_star=0 ") != std::string::npos);

    std::stringstream ss(read_file(trace));
    std::string line;
    std::getline(ss, line);
    CHECK(line == "eta,status,t_bar");
    double best = 1e300, best_eta = -1;
    int rows = 0;
    while (std::getline(ss, line)) {
        const auto cells = split(line);
        ++rows;
        if (cells[1] != "optimal") continue;
        const double t = std::stod(cells[2]);
        if (t < best) best = t, best_eta = std::stod(cells[0]);
    }
    CHECK(rows == 101);
    CHECK(best_eta == 0.0);

    // the written policy can be evaluated again
    const Outcome again = run({"evaluate", "--config", kConfig, "--alpha", "0.05", "--policy", policy});
    REQUIRE(again.code == 0);
    CHECK(std::stod(csv_record(again.out).at("t_bar")) == doctest::Approx(best).epsilon(1e-6));
}

TEST_CASE("optimize at high load uses the CPU") {
    const std::string mps = (scratch_dir() / "p2.mps").string();
    const Outcome o = run({"optimize", "--config", kConfig, "--alpha", "0.3", "--mps", mps});
    REQUIRE(o.code == 0);
    const auto pos = o.err.find("eta_star=");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(o.err.substr(pos + 9)) > 0.0);
    CHECK(read_file(mps).rfind("NAME", 0) == 0);
}

TEST_CASE("optimize without a power budget") {
    const Outcome o = run({"optimize", "--config", kConfig, "--pmax", "0", "--buffer-cap", "5"});
    CHECK(o.code == 1);
    CHECK(o.err.find("no eta grid point") != std::string::npos);
}

TEST_CASE("sweep rows, order and determinism") {
    const std::vector<std::string> base{"sweep", "--config", kConfig, "--buffer-cap", "8", "--alpha-start", "0.1",
                                        "--alpha-end", "0.14", "--alpha-step", "0.02", "--policies",
                                        "local,cloud,optimal", "--grid", "10"};
    const Outcome serial = run(base);
    auto parallel_args = base;
    parallel_args.insert(parallel_args.end(), {"--jobs", "3"});
    const Outcome parallel = run(parallel_args);
    CHECK(serial.out == parallel.out);
    CHECK(serial.code == parallel.code);

    std::stringstream ss(serial.out);
    std::string line;
    std::getline(ss, line);
    CHECK(line == "alpha,beta,policy_name,t_q,eta,t_p,t_bar,nu_loc,nu_tx,p_bar,overflow_mass,t_q_ms,t_p_ms,"
                  "t_bar_ms,valid,eta_star,status,message");
    std::vector<std::vector<std::string>> rows;
    while (std::getline(ss, line)) rows.push_back(split(line));
    REQUIRE(rows.size() == 9);
    const char* order[] = {"local", "cloud", "optimal"};
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].size() == 18);
        CHECK(rows[i][2] == order[i % 3]);
        CHECK(rows[i][0] == (i < 3 ? "0.1" : i < 6 ? "0.12" : "0.14"));
        CHECK(rows[i][16] == (rows[i][14] == "1" ? "ok" : "overflow"));
        CHECK(rows[i][15].empty() == (rows[i][2] != "optimal"));
    }
    // local-only is overloaded at these rates, so the run reports a validity warning
    CHECK(rows[0][16] == "overflow");
    CHECK(serial.code == 2);
}

TEST_CASE("sweep records failures per row") {
    const Outcome o = run({"sweep", "--config", kConfig, "--buffer-cap", "4", "--pmax", "0", "--alpha-start", "0.1",
                           "--alpha-end", "0.1", "--policies", "cloud,optimal", "--grid", "4"});
    CHECK(o.code == 2);
    const auto rec = csv_record(o.out, 2);
    CHECK(rec.at("policy_name") == "optimal");
    CHECK(rec.at("status") == "error");
    CHECK(rec.at("t_bar").empty());
    CHECK(rec.at("valid") == "0");
    CHECK_FALSE(rec.at("message").empty());
    CHECK(csv_record(o.out, 1).at("status") == "ok");
}

TEST_CASE("sweep range checks") {
    mec::cli::SweepSpec spec;
    CHECK_NOTHROW(spec.validate());
    CHECK(spec.alphas().size() == 20);
    CHECK(spec.alphas().back() == 0.4);
    CHECK(spec.alphas()[2] == 0.06);
    spec.alpha_start = 0.5;
    CHECK_THROWS(spec.validate());
    spec = {};
    spec.alpha_step = 0;
    CHECK_THROWS(spec.validate());
    spec = {};
    spec.policies = {"fastest"};
    CHECK_THROWS(spec.validate());
    CHECK(run({"sweep", "--config", kConfig, "--alpha-start", "0"}).code == 1);
}

TEST_CASE("simulate") {
    const Outcome o = run({"simulate", "--config", kConfig, "--policy", "cloud", "--slots", "1000000", "--seed", "1"});
    REQUIRE(o.code == 0);
    const auto rec = csv_record(o.out);
    CHECK(std::stod(rec.at("mean_delay")) == doctest::Approx(6.0).epsilon(0.02));
    CHECK(rec.at("dropped_tasks") == "0");
    CHECK(rec.at("seed") == "1");

    const Outcome twice = run({"simulate", "--config", kConfig, "--policy", "cloud", "--slots", "1000000", "--seed", "1"});
    CHECK(twice.out == o.out);

    const Outcome idle = run({"simulate", "--config", kConfig, "--policy", "greedy", "--alpha", "0", "--slots", "10000",
                              "--format", "json"});
    REQUIRE(idle.code == 0);
    const auto doc = nlohmann::json::parse(idle.out);
    CHECK(doc["arrivals"] == 0);
    CHECK(doc["mean_power"].get<double>() == 0.0);
    CHECK(doc["completed_tasks"] == 0);
}

TEST_CASE("simulate writes a task trace") {
    const std::string trace = (scratch_dir() / "tasks.csv").string();
    const Outcome o = run({"simulate", "--config", kConfig, "--policy", "greedy", "--slots", "2000", "--warmup", "0",
                           "--trace", trace});
    REQUIRE(o.code == 0);
    const std::string t = read_file(trace);
    CHECK(t.rfind("arrival_slot,start_slot,completion_slot,venue,delay_slots\n", 0) == 0);
    CHECK(std::count(t.begin(), t.end(), '\n') == 1 + std::stol(csv_record(o.out).at("completed_tasks")));
}

TEST_CASE("usage errors") {
    CHECK(run({}).code == 1);
    CHECK(run({"derive"}).code == 1);
    CHECK(run({"frobnicate", "--config", kConfig}).code == 1);
    CHECK(run({"--help"}).code == 0);
    CHECK(run({"derive", "--config", kConfig, "--format", "xml"}).code == 1);
}
