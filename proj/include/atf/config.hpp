#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "atf/params.hpp"
#include "atf/sim.hpp"

namespace atf {

// Everything a run needs: the physical system plus simulator settings.
struct RunConfig {
    SystemParams params;
    SimConfig sim;
    unsigned replications = 1;
};

namespace detail {

inline std::string trim(const std::string& s)
{
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

inline std::string lower(std::string s)
{
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

// Parses "<number> [unit]". Power keys take an optional dbm or w suffix;
// everything else must be a bare number.
inline double parse_number(const std::string& key, const std::string& raw,
                           bool is_power)
{
    std::istringstream in(raw);
    double value;
    std::string unit;
    if (!(in >> value))
        throw invalid_parameter("config: bad numeric value for '" + key +
                                "': " + raw);
    in >> unit;
    std::string rest;
    if (in >> rest)
        throw invalid_parameter("config: trailing garbage for '" + key +
                                "': " + raw);
    if (unit.empty())
        return value;
    if (!is_power)
        throw invalid_parameter("config: unit suffix not allowed for '" + key +
                                "'");
    const std::string u = lower(unit);
    if (u == "dbm") return dbm_to_watts(value);
    if (u == "w") return value;
    throw invalid_parameter("config: unknown unit '" + unit + "' for '" + key +
                            "' (use dbm or w)");
}

inline std::uint64_t parse_u64(const std::string& key, const std::string& raw)
{
    std::istringstream in(raw);
    std::uint64_t value;
    if (!(in >> value) || !(in >> std::ws).eof())
        throw invalid_parameter("config: bad integer for '" + key + "': " + raw);
    return value;
}

inline int parse_int(const std::string& key, const std::string& raw)
{
    std::istringstream in(raw);
    long long value;
    if (!(in >> value) || !(in >> std::ws).eof())
        throw invalid_parameter("config: bad integer for '" + key + "': " + raw);
    if (value < INT32_MIN || value > INT32_MAX)
        throw invalid_parameter("config: integer out of range for '" + key + "'");
    return static_cast<int>(value);
}

}  // namespace detail

// Applies one "key = value" assignment. Keys match the parameter fields
// exactly; P_S and N0 accept a dbm or w suffix.
inline void apply_setting(RunConfig& cfg, const std::string& key,
                          const std::string& value)
{
    const std::string v = detail::trim(value);
    if (v.empty())
        throw invalid_parameter("config: empty value for '" + key + "'");
    if (key == "P_S")       cfg.params.P_S = detail::parse_number(key, v, true);
    else if (key == "N0")   cfg.params.N0 = detail::parse_number(key, v, true);
    else if (key == "eta")  cfg.params.eta = detail::parse_number(key, v, false);
    else if (key == "R")    cfg.params.R = detail::parse_number(key, v, false);
    else if (key == "N")    cfg.params.N = detail::parse_int(key, v);
    else if (key == "K")    cfg.params.K = detail::parse_number(key, v, false);
    else if (key == "d_SD") cfg.params.d_SD = detail::parse_number(key, v, false);
    else if (key == "d_SR") cfg.params.d_SR = detail::parse_number(key, v, false);
    else if (key == "d_RD") cfg.params.d_RD = detail::parse_number(key, v, false);
    else if (key == "alpha") cfg.params.alpha = detail::parse_number(key, v, false);
    else if (key == "C")    cfg.params.C = detail::parse_number(key, v, false);
    else if (key == "L")    cfg.params.L = detail::parse_int(key, v);
    else if (key == "E_T")  cfg.params.E_T = detail::parse_number(key, v, false);
    else if (key == "blocks") cfg.sim.blocks = detail::parse_u64(key, v);
    else if (key == "warmup") cfg.sim.warmup = detail::parse_u64(key, v);
    else if (key == "seed")   cfg.sim.seed = detail::parse_u64(key, v);
    else if (key == "replications") {
        const int n = detail::parse_int(key, v);
        if (n < 1) throw invalid_parameter("config: replications must be >= 1");
        cfg.replications = static_cast<unsigned>(n);
    } else if (key == "battery_model") {
        const std::string m = detail::lower(v);
        if (m == "continuous") cfg.sim.battery_model = BatteryModel::continuous;
        else if (m == "discrete") cfg.sim.battery_model = BatteryModel::discrete;
        else throw invalid_parameter(
                 "config: battery_model must be continuous or discrete");
    } else {
        throw invalid_parameter("config: unknown key '" + key + "'");
    }
}

// Parses "key=value" (one CLI override).
inline void apply_override(RunConfig& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw invalid_parameter("override must look like key=value: " +
                                assignment);
    apply_setting(cfg, detail::trim(assignment.substr(0, eq)),
                  assignment.substr(eq + 1));
}

inline RunConfig parse_config(std::istream& in)
{
    RunConfig cfg;
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
            throw invalid_parameter("config line " + std::to_string(lineno) +
                                    ": expected key = value");
        apply_setting(cfg, detail::trim(line.substr(0, eq)),
                      line.substr(eq + 1));
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw invalid_parameter("cannot open config file: " + path);
    return parse_config(in);
}

}  // namespace atf
