// config.hpp — Experiment configuration: parsing, validation, defaults, env overrides

#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "spincoh/fringe.hpp"
#include "spincoh/system_params.hpp"

namespace spincoh {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::vector<std::string>& problems);
    std::vector<std::string> problems;
};

struct TauGridSpec {
    double start_ns = 0.0;
    double stop_ns = 4.0;
    int points = 101;
    bool log_spaced = false;

    std::vector<double> build() const;
    bool operator==(const TauGridSpec&) const = default;
};

// One plain-text `key = value` format with [section] headers; see
// docs in serialize() output and README. Every key can be overridden by an
// environment variable SPINCOH_<SECTION>_<KEY> (uppercase).
struct ExperimentConfig {
    // [system] — electron-case default parameters
    double t1_ns = 0.76;
    std::optional<double> t2_ns;       // exactly one of t2_ns / gamma3
    std::optional<double> gamma3;      // 1/ns
    double t2star_ns = 2.4;
    double omega12_ghz = 22.0;
    std::optional<double> p_over_psat; // exactly one of p_over_psat / omega_rad_ns
    std::optional<double> omega_rad_ns;

    // [sweep]
    TauGridSpec tau{};
    std::vector<double> powers = {0.05, 0.1364, 0.2227, 0.3091, 0.3955, 0.4818,
                                  0.5682, 0.6545, 0.7409, 0.8273, 0.9136, 1.0};
    int phase_points = 24;
    double mean_rate = 500.0;
    std::string fringe_channel = "diag1";  // diag1 | blue
    std::vector<double> delta_ts_ns = {0.75, 3.0};
    int quad_order = 64;

    // [sequence]
    PulseSequence sequence{};

    // [output]
    std::string out_dir = "out";
    bool write_csv = true;
    bool write_json = true;

    std::uint64_t seed = 1;
    std::string preset;  // "", "electron" or "hole"

    // Derived views (validated config assumed).
    double resolved_t2_ns() const { return t2_ns ? *t2_ns : 2.0 * t1_ns; }
    SystemParams system_params() const;

    bool operator==(const ExperimentConfig&) const = default;
};

struct LoadedConfig {
    ExperimentConfig config;
    std::vector<std::string> defaults_applied;  // "section.key = value (reason)"
    std::vector<std::string> env_overrides;     // "SPINCOH_... -> section.key"
};

LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config(const std::string& path);
std::string serialize(const ExperimentConfig& cfg);

// Environment-variable name for a config key, e.g. ("system", "t1_ns") ->
// "SPINCOH_SYSTEM_T1_NS". Top-level keys use section "top".
std::string env_var_name(const std::string& section, const std::string& key);

} // namespace spincoh
