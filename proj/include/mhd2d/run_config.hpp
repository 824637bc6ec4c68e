#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <sstream>
#include <string>

#include "errors.hpp"
#include "scenarios.hpp"

namespace mhd2d {

/// File-backed run configuration: flat `key = value` lines, '#' comments,
/// unknown keys rejected so a typo cannot silently change a run.
struct RunConfig {
    int grid_n = 0;              // required
    double dt = 0.0;             // required
    double t_end = -1.0;         // required (0 allowed: record the initial state only)
    ScenarioKind scenario = ScenarioKind::taylor_green;  // required
    std::uint64_t seed = 1;
    double eps_rel = 1e-6;
    int snapshot_every = 20;
    std::string output_dir = ".";

    SolverConfig solver_config() const {
        SolverConfig cfg;
        cfg.dt = dt;
        cfg.eps_rel = eps_rel;
        return cfg;
    }
    Scenario scenario_config() const { return Scenario{scenario, seed, 1.0}; }
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

template <class T>
inline T parse_number(const std::string& key, const std::string& text) {
    std::istringstream ss(text);
    T v{};
    ss >> v;
    if (ss.fail() || !(ss >> std::ws).eof())
        throw ConfigError("config: bad value for " + key + ": '" + text + "'");
    return v;
}

}  // namespace detail

inline RunConfig parse_run_config(std::istream& in) {
    RunConfig cfg;
    bool have_n = false, have_dt = false, have_t_end = false, have_scenario = false;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
        const std::string key = detail::trim(line.substr(0, eq));
        const std::string value = detail::trim(line.substr(eq + 1));
        if (key == "grid_n") {
            cfg.grid_n = detail::parse_number<int>(key, value);
            have_n = true;
        } else if (key == "dt") {
            cfg.dt = detail::parse_number<double>(key, value);
            have_dt = true;
        } else if (key == "t_end") {
            cfg.t_end = detail::parse_number<double>(key, value);
            have_t_end = true;
        } else if (key == "scenario") {
            cfg.scenario = scenario_from_name(value);
            have_scenario = true;
        } else if (key == "seed") {
            cfg.seed = detail::parse_number<std::uint64_t>(key, value);
        } else if (key == "eps_rel") {
            cfg.eps_rel = detail::parse_number<double>(key, value);
        } else if (key == "snapshot_every") {
            cfg.snapshot_every = detail::parse_number<int>(key, value);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw ConfigError("config line " + std::to_string(lineno) + ": unknown key '" +
                              key + "'");
        }
    }
    if (!have_n || !have_dt || !have_t_end || !have_scenario)
        throw ConfigError("config: grid_n, dt, t_end and scenario are required");
    if (cfg.grid_n < 16 || (cfg.grid_n & (cfg.grid_n - 1)) != 0)
        throw ConfigError("config: grid_n must be a power of two >= 16");
    if (!(cfg.dt > 0.0)) throw ConfigError("config: dt must be positive");
    if (cfg.t_end < 0.0) throw ConfigError("config: t_end must be >= 0");
    if (!(cfg.eps_rel > 0.0 && cfg.eps_rel < 1.0))
        throw ConfigError("config: eps_rel must lie in (0, 1)");
    if (cfg.snapshot_every < 1) throw ConfigError("config: snapshot_every must be >= 1");
    return cfg;
}

inline RunConfig parse_run_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path);
    return parse_run_config(in);
}

}  // namespace mhd2d
