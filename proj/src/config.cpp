#include "mec/config.hpp"

#include "mec/error.hpp"

#include <array>
#include <fstream>
#include <istream>
#include <map>
#include <string_view>

namespace mec {

namespace {

constexpr std::array<std::string_view, 11> kSystemKeys{
    "alpha", "beta", "slot_len", "buffer_cap", "packets_per_task", "local_slots",
    "cloud_slots", "feedback_slots", "p_loc", "p_tx", "p_max"};
constexpr std::array<std::string_view, 9> kPhysicalKeys{
    "data_bits", "cycles_per_task", "f_loc", "f_ser", "bandwidth",
    "noise_power", "tx_power", "mean_gain", "kappa"};

bool known(std::string_view key) {
    for (auto k : kSystemKeys)
        if (k == key) return true;
    for (auto k : kPhysicalKeys)
        if (k == key) return true;
    return false;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct Entry {
    double value;
    int line;
};

class Entries {
  public:
    explicit Entries(std::map<std::string, Entry> m) : m_(std::move(m)) {}

    bool has(const std::string& key) const { return m_.count(key) != 0; }

    double real(const std::string& key) const {
        auto it = m_.find(key);
        if (it == m_.end()) throw ParseError("missing required key '" + key + "'", 0);
        return it->second.value;
    }
    double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

    int integer(const std::string& key) const {
        const double v = real(key);
        if (v != static_cast<double>(static_cast<long long>(v)) || v > 1e9 || v < -1e9)
            throw ParseError("key '" + key + "' must be an integer", m_.at(key).line);
        return static_cast<int>(v);
    }
    int integer(const std::string& key, int fallback) const { return has(key) ? integer(key) : fallback; }

    std::optional<double> maybe(const std::string& key) const {
        return has(key) ? std::optional<double>(real(key)) : std::nullopt;
    }

    int line(const std::string& key) const { return has(key) ? m_.at(key).line : 0; }

  private:
    std::map<std::string, Entry> m_;
};

} // namespace

Config parse_config(std::istream& is) {
    std::map<std::string, Entry> raw;
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("expected 'key = value'", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string text = trim(line.substr(eq + 1));
        if (!known(key)) throw ParseError("unknown key '" + key + "'", lineno);
        if (raw.count(key)) throw ParseError("duplicate key '" + key + "'", lineno);
        double value = 0.0;
        try {
            std::size_t used = 0;
            value = std::stod(text, &used);
            if (used != text.size()) throw std::invalid_argument(text);
        } catch (const std::logic_error&) {
            throw ParseError("value of '" + key + "' is not a number", lineno);
        }
        raw.emplace(key, Entry{value, lineno});
    }
    const Entries e(std::move(raw));

    bool physical = false;
    for (auto k : kPhysicalKeys)
        if (e.has(std::string(k))) physical = true;

    Config cfg;
    try {
        if (!physical) {
            SystemParams& p = cfg.params;
            p.alpha = e.real("alpha");
            p.beta = e.real("beta");
            p.slot_len = e.real("slot_len");
            p.buffer_cap = e.integer("buffer_cap", 50);
            p.packets_per_task = e.integer("packets_per_task");
            p.local_slots = e.integer("local_slots");
            p.cloud_slots = e.integer("cloud_slots");
            p.feedback_slots = e.real("feedback_slots", 0.0);
            p.p_loc = e.real("p_loc");
            p.p_tx = e.real("p_tx");
            p.p_max = e.real("p_max", p.p_loc + p.beta * p.p_tx);
            p.validate();
            return cfg;
        }

        for (const char* derived : {"local_slots", "cloud_slots", "p_loc", "p_tx"})
            if (e.has(derived))
                throw ParseError(std::string("key '") + derived + "' conflicts with physical inputs",
                                 e.line(derived));

        PhysicalInputs phys;
        phys.data_bits = e.real("data_bits");
        phys.cycles_per_task = e.real("cycles_per_task");
        phys.f_loc = e.real("f_loc");
        phys.f_ser = e.real("f_ser");
        phys.kappa = e.real("kappa");
        phys.tx_power = e.real("tx_power");
        const std::optional<double> beta = e.maybe("beta");
        if (!beta) {
            phys.bandwidth = e.real("bandwidth");
            phys.noise_power = e.real("noise_power");
            phys.mean_gain = e.real("mean_gain");
        } else {
            phys.bandwidth = e.real("bandwidth", 0.0);
            phys.noise_power = e.real("noise_power", 0.0);
            phys.mean_gain = e.real("mean_gain", 0.0);
        }

        SlotSettings slot;
        slot.alpha = e.real("alpha");
        slot.slot_len = e.real("slot_len");
        slot.buffer_cap = e.integer("buffer_cap", 50);
        slot.packets_per_task = e.integer("packets_per_task");
        slot.feedback_slots = e.real("feedback_slots", 0.0);
        slot.p_max = e.maybe("p_max");

        cfg.params = derive_constants(phys, slot, beta);
        cfg.physical = phys;
    } catch (const InvalidParameter& err) {
        throw ParseError(err.what(), 0);
    }
    return cfg;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open config file '" + path + "'", 0);
    return parse_config(in);
}

} // namespace mec
