#include "mhdlab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mhd {

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

[[noreturn]] void bad_value(const std::string& key) {
    throw std::invalid_argument("config: bad value for key '" + key + "'");
}

}  // namespace

const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys{
        // ScenarioConfig
        "kind", "M", "T", "nu", "eta", "n", "m", "L", "c", "eps", "p", "q",
        "R", "seed", "resolution", "dt",
        // MhdParams extras
        "t_end", "dealias", "integrator", "freeze_velocity"};
    return keys;
}

bool ConfigFile::has(const std::string& key) const {
    return entries.count(key) != 0;
}

std::string ConfigFile::get_string(const std::string& key,
                                   const std::string& fallback) const {
    const auto it = entries.find(key);
    return it == entries.end() ? fallback : it->second;
}

double ConfigFile::get_double(const std::string& key, double fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(it->second, &pos);
    } catch (const std::exception&) {
        bad_value(key);
    }
    if (pos != it->second.size()) bad_value(key);
    return v;
}

int ConfigFile::get_int(const std::string& key, int fallback) const {
    const double v = get_double(key, static_cast<double>(fallback));
    const int i = static_cast<int>(v);
    if (static_cast<double>(i) != v) bad_value(key);
    return i;
}

std::uint64_t ConfigFile::get_uint64(const std::string& key,
                                     std::uint64_t fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    std::size_t pos = 0;
    std::uint64_t v = 0;
    try {
        v = std::stoull(it->second, &pos);
    } catch (const std::exception&) {
        bad_value(key);
    }
    if (pos != it->second.size()) bad_value(key);
    return v;
}

bool ConfigFile::get_bool(const std::string& key, bool fallback) const {
    const auto it = entries.find(key);
    if (it == entries.end()) return fallback;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    bad_value(key);
}

ConfigFile parse_config(const std::string& text) {
    const auto& allowed = config_keys();
    ConfigFile cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config: line " +
                                        std::to_string(lineno) +
                                        " is not 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument("config: line " +
                                        std::to_string(lineno) +
                                        " is not 'key = value'");
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end())
            throw std::invalid_argument("config: unknown key '" + key + "'");
        if (cfg.entries.count(key))
            throw std::invalid_argument("config: duplicate key '" + key + "'");
        cfg.entries[key] = value;
    }
    return cfg;
}

ConfigFile load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("config: cannot open " + path);
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

ScenarioConfig scenario_from_config(const ConfigFile& cfg) {
    ScenarioConfig out;
    out.kind = cfg.get_string("kind", out.kind);
    out.M = cfg.get_double("M", out.M);
    out.T = cfg.get_double("T", out.T);
    out.nu = cfg.get_double("nu", out.nu);
    out.eta = cfg.get_double("eta", out.eta);
    out.n = cfg.get_int("n", out.n);
    out.m = cfg.get_int("m", out.m);
    out.L = cfg.get_int("L", out.L);
    out.c = cfg.get_double("c", out.c);
    out.eps = cfg.get_double("eps", out.eps);
    out.p = cfg.get_int("p", out.p);
    out.q = cfg.get_int("q", out.q);
    out.R = cfg.get_double("R", out.R);
    out.seed = cfg.get_uint64("seed", out.seed);
    out.resolution = cfg.get_int("resolution", out.resolution);
    out.dt = cfg.get_double("dt", out.dt);
    return out;
}

MhdParams params_from_config(const ConfigFile& cfg) {
    MhdParams p;
    p.nu = cfg.get_double("nu", p.nu);
    p.eta = cfg.get_double("eta", p.eta);
    p.dt = cfg.get_double("dt", p.dt);
    p.t_end = cfg.get_double("t_end", p.t_end);
    p.dealias = cfg.get_bool("dealias", p.dealias);
    const std::string integ = cfg.get_string("integrator", "ifrk4");
    if (integ == "ifrk4") p.integrator = Integrator::kIFRK4;
    else if (integ == "etdrk4") p.integrator = Integrator::kETDRK4;
    else throw std::invalid_argument("config: bad value for key 'integrator'");
    p.freeze_velocity = cfg.get_bool("freeze_velocity", p.freeze_velocity);
    p.validate();
    return p;
}

}  // namespace mhd
