#pragma once

#include <map>
#include <string>
#include <vector>

#include "mhdlab/scenarios.hpp"
#include "mhdlab/solver.hpp"

namespace mhd {

// Line-oriented `key = value` text; `#` starts a comment. Keys are the
// ScenarioConfig / MhdParams field names; unknown keys are rejected.
struct ConfigFile {
    std::map<std::string, std::string> entries;

    bool has(const std::string& key) const;
    std::string get_string(const std::string& key,
                           const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_uint64(const std::string& key,
                             std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
};

// The accepted key set for scenario and solver configuration files.
const std::vector<std::string>& config_keys();

ConfigFile parse_config(const std::string& text);
ConfigFile load_config(const std::string& path);

ScenarioConfig scenario_from_config(const ConfigFile& cfg);
MhdParams params_from_config(const ConfigFile& cfg);

}  // namespace mhd
