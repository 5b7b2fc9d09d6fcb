#include "spincoh/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include "spincoh/spectral.hpp"

namespace spincoh {

namespace {

std::string join(const std::vector<std::string>& v, const std::string& sep) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += sep;
        out += v[i];
    }
    return out;
}

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

double parse_double(const std::string& v) {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("not a number: '" + v + "'");
    return x;
}

std::uint64_t parse_u64(const std::string& v) {
    std::size_t pos = 0;
    const unsigned long long x = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
    return x;
}

int parse_int(const std::string& v) {
    std::size_t pos = 0;
    const int x = std::stoi(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("not an integer: '" + v + "'");
    return x;
}

bool parse_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw std::invalid_argument("not a boolean: '" + v + "'");
}

std::vector<double> parse_list(const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) throw std::invalid_argument("empty list element");
        out.push_back(parse_double(item));
    }
    if (out.empty()) throw std::invalid_argument("empty list");
    return out;
}

std::string format_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.15g", x);
    return buf;
}

std::string format_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ", ";
        out += format_double(v[i]);
    }
    return out;
}

struct KeyEntry {
    std::string section;
    std::string key;
    std::function<void(ExperimentConfig&, const std::string&)> set;
    std::function<std::string(const ExperimentConfig&)> get;
    // keys that may be absent from serialized output (exactly-one pairs)
    std::function<bool(const ExperimentConfig&)> present = nullptr;
};

const std::vector<KeyEntry>& schema() {
    static const std::vector<KeyEntry> table = [] {
        std::vector<KeyEntry> t;
        auto add = [&t](std::string section, std::string key, auto set, auto get,
                        std::function<bool(const ExperimentConfig&)> present = nullptr) {
            t.push_back({std::move(section), std::move(key), set, get, std::move(present)});
        };
        using C = ExperimentConfig;
        add("top", "preset", [](C& c, const std::string& v) {
                if (v != "electron" && v != "hole")
                    throw std::invalid_argument("preset must be 'electron' or 'hole'");
                c.preset = v;
            },
            [](const C& c) { return c.preset; },
            [](const C& c) { return !c.preset.empty(); });
        add("top", "seed", [](C& c, const std::string& v) { c.seed = parse_u64(v); },
            [](const C& c) { return std::to_string(c.seed); });

        add("system", "t1_ns", [](C& c, const std::string& v) { c.t1_ns = parse_double(v); },
            [](const C& c) { return format_double(c.t1_ns); });
        add("system", "t2_ns", [](C& c, const std::string& v) { c.t2_ns = parse_double(v); },
            [](const C& c) { return format_double(*c.t2_ns); },
            [](const C& c) { return c.t2_ns.has_value(); });
        add("system", "gamma3", [](C& c, const std::string& v) { c.gamma3 = parse_double(v); },
            [](const C& c) { return format_double(*c.gamma3); },
            [](const C& c) { return c.gamma3.has_value(); });
        add("system", "t2star_ns",
            [](C& c, const std::string& v) { c.t2star_ns = parse_double(v); },
            [](const C& c) { return format_double(c.t2star_ns); });
        add("system", "omega12_ghz",
            [](C& c, const std::string& v) { c.omega12_ghz = parse_double(v); },
            [](const C& c) { return format_double(c.omega12_ghz); });
        add("system", "p_over_psat",
            [](C& c, const std::string& v) { c.p_over_psat = parse_double(v); },
            [](const C& c) { return format_double(*c.p_over_psat); },
            [](const C& c) { return c.p_over_psat.has_value(); });
        add("system", "omega_rad_ns",
            [](C& c, const std::string& v) { c.omega_rad_ns = parse_double(v); },
            [](const C& c) { return format_double(*c.omega_rad_ns); },
            [](const C& c) { return c.omega_rad_ns.has_value(); });

        add("sweep", "tau_start_ns",
            [](C& c, const std::string& v) { c.tau.start_ns = parse_double(v); },
            [](const C& c) { return format_double(c.tau.start_ns); });
        add("sweep", "tau_stop_ns",
            [](C& c, const std::string& v) { c.tau.stop_ns = parse_double(v); },
            [](const C& c) { return format_double(c.tau.stop_ns); });
        add("sweep", "tau_points",
            [](C& c, const std::string& v) { c.tau.points = parse_int(v); },
            [](const C& c) { return std::to_string(c.tau.points); });
        add("sweep", "tau_log",
            [](C& c, const std::string& v) { c.tau.log_spaced = parse_bool(v); },
            [](const C& c) { return c.tau.log_spaced ? std::string("true") : std::string("false"); });
        add("sweep", "powers", [](C& c, const std::string& v) { c.powers = parse_list(v); },
            [](const C& c) { return format_list(c.powers); });
        add("sweep", "phase_points",
            [](C& c, const std::string& v) { c.phase_points = parse_int(v); },
            [](const C& c) { return std::to_string(c.phase_points); });
        add("sweep", "mean_rate",
            [](C& c, const std::string& v) { c.mean_rate = parse_double(v); },
            [](const C& c) { return format_double(c.mean_rate); });
        add("sweep", "fringe_channel",
            [](C& c, const std::string& v) {
                if (v != "diag1" && v != "blue")
                    throw std::invalid_argument("fringe_channel must be 'diag1' or 'blue'");
                c.fringe_channel = v;
            },
            [](const C& c) { return c.fringe_channel; });
        add("sweep", "delta_ts_ns",
            [](C& c, const std::string& v) { c.delta_ts_ns = parse_list(v); },
            [](const C& c) { return format_list(c.delta_ts_ns); });
        add("sweep", "quad_order",
            [](C& c, const std::string& v) { c.quad_order = parse_int(v); },
            [](const C& c) { return std::to_string(c.quad_order); });

        add("sequence", "prep_ns",
            [](C& c, const std::string& v) { c.sequence.prep_ns = parse_double(v); },
            [](const C& c) { return format_double(c.sequence.prep_ns); });
        add("sequence", "excite_ns",
            [](C& c, const std::string& v) { c.sequence.excite_ns = parse_double(v); },
            [](const C& c) { return format_double(c.sequence.excite_ns); });
        add("sequence", "rep_period_ns",
            [](C& c, const std::string& v) { c.sequence.rep_period_ns = parse_double(v); },
            [](const C& c) { return format_double(c.sequence.rep_period_ns); });
        add("sequence", "window_start_ns",
            [](C& c, const std::string& v) { c.sequence.window.start_ns = parse_double(v); },
            [](const C& c) { return format_double(c.sequence.window.start_ns); });
        add("sequence", "window_length_ns",
            [](C& c, const std::string& v) { c.sequence.window.length_ns = parse_double(v); },
            [](const C& c) { return format_double(c.sequence.window.length_ns); });
        add("sequence", "mode",
            [](C& c, const std::string& v) {
                if (v == "single") c.sequence.mode = PulseMode::SinglePulse;
                else if (v == "double") c.sequence.mode = PulseMode::DoublePulse;
                else throw std::invalid_argument("mode must be 'single' or 'double'");
            },
            [](const C& c) {
                return c.sequence.mode == PulseMode::SinglePulse ? std::string("single")
                                                                 : std::string("double");
            });
        add("sequence", "t0_ns",
            [](C& c, const std::string& v) { c.sequence.t0_ns = parse_double(v); },
            [](const C& c) { return format_double(c.sequence.t0_ns); });

        add("output", "dir", [](C& c, const std::string& v) { c.out_dir = v; },
            [](const C& c) { return c.out_dir; });
        add("output", "csv", [](C& c, const std::string& v) { c.write_csv = parse_bool(v); },
            [](const C& c) { return c.write_csv ? std::string("true") : std::string("false"); });
        add("output", "json", [](C& c, const std::string& v) { c.write_json = parse_bool(v); },
            [](const C& c) { return c.write_json ? std::string("true") : std::string("false"); });
        return t;
    }();
    return table;
}

const KeyEntry* find_key(const std::string& section, const std::string& key) {
    for (const KeyEntry& e : schema())
        if (e.section == section && e.key == key) return &e;
    return nullptr;
}

// Applies preset base values and returns the keys it touched.
std::vector<std::string> apply_preset(ExperimentConfig& c, std::vector<std::string>& log) {
    if (c.preset != "hole") return {};
    // Heavy-hole case: slower inhomogeneous dephasing, smaller Zeeman
    // splitting, double-pulse sequence with delay-matched excitation.
    c.t2star_ns = 25.7;
    c.omega12_ghz = 8.0;
    c.sequence.mode = PulseMode::DoublePulse;
    c.sequence.t0_ns = 3.0;
    c.sequence.excite_ns = 3.0;
    c.sequence.window = {0.0, 2.5};
    c.p_over_psat = 0.05;
    c.tau.stop_ns = 40.0;
    c.tau.points = 41;
    c.delta_ts_ns = {5.0, 25.0};
    log.push_back("preset hole: t2star_ns = 25.7, omega12_ghz = 8, p_over_psat = 0.05, "
                  "double-pulse sequence");
    return {"system.t2star_ns", "system.omega12_ghz", "system.p_over_psat",
            "sequence.mode", "sequence.t0_ns", "sequence.excite_ns",
            "sequence.window_start_ns", "sequence.window_length_ns",
            "sweep.tau_stop_ns", "sweep.tau_points", "sweep.delta_ts_ns"};
}

void validate_config(const ExperimentConfig& c, std::vector<std::string>& problems) {
    if (c.t2_ns && c.gamma3)
        problems.push_back(
            "system.t2_ns and system.gamma3 are both set; give exactly one");
    if (c.p_over_psat && c.omega_rad_ns)
        problems.push_back(
            "system.p_over_psat and system.omega_rad_ns are both set; give exactly one");
    if (!(c.t1_ns > 0.0)) problems.push_back("system.t1_ns must be > 0");
    if (c.t2_ns && !(*c.t2_ns > 0.0)) problems.push_back("system.t2_ns must be > 0");
    if (c.t2_ns && *c.t2_ns > 2.0 * c.t1_ns + 1e-12)
        problems.push_back("system.t2_ns must satisfy T2 <= 2*T1");
    if (c.gamma3 && *c.gamma3 < 0.0) problems.push_back("system.gamma3 must be >= 0");
    if (!(c.t2star_ns > 0.0)) problems.push_back("system.t2star_ns must be > 0");
    if (c.p_over_psat && *c.p_over_psat < 0.0)
        problems.push_back("system.p_over_psat must be >= 0");
    if (c.omega_rad_ns && *c.omega_rad_ns < 0.0)
        problems.push_back("system.omega_rad_ns must be >= 0");
    if (!(c.tau.stop_ns > c.tau.start_ns))
        problems.push_back("sweep.tau_stop_ns must exceed sweep.tau_start_ns");
    if (c.tau.points < 2) problems.push_back("sweep.tau_points must be >= 2");
    if (c.tau.log_spaced && !(c.tau.start_ns > 0.0))
        problems.push_back("sweep.tau_start_ns must be > 0 for a log-spaced grid");
    for (double x : c.powers)
        if (!(x > 0.0)) {
            problems.push_back("sweep.powers must all be > 0");
            break;
        }
    if (c.phase_points < 6) problems.push_back("sweep.phase_points must be >= 6");
    if (c.mean_rate < 0.0) problems.push_back("sweep.mean_rate must be >= 0");
    if (c.quad_order < 2) problems.push_back("sweep.quad_order must be >= 2");
    for (double dt : c.delta_ts_ns)
        if (dt < 0.0) {
            problems.push_back("sweep.delta_ts_ns must all be >= 0");
            break;
        }
    if (c.out_dir.empty()) problems.push_back("output.dir must not be empty");
    try {
        c.sequence.validate();
    } catch (const std::invalid_argument& e) {
        problems.push_back(std::string("sequence: ") + e.what());
    }
}

} // namespace

ConfigError::ConfigError(const std::vector<std::string>& p)
    : std::runtime_error("configuration invalid:\n  " + join(p, "\n  ")), problems(p) {}

std::vector<double> TauGridSpec::build() const {
    std::vector<double> g(points);
    if (log_spaced) {
        const double la = std::log(start_ns), lb = std::log(stop_ns);
        for (int i = 0; i < points; ++i)
            g[i] = std::exp(la + (lb - la) * i / (points - 1));
    } else {
        for (int i = 0; i < points; ++i)
            g[i] = start_ns + (stop_ns - start_ns) * i / (points - 1);
    }
    return g;
}

SystemParams ExperimentConfig::system_params() const {
    const DecayRates r = gamma3 ? DecayRates{1.0 / t1_ns, *gamma3}
                                : lifetimes_to_rates(t1_ns, resolved_t2_ns());
    const double omega =
        omega_rad_ns ? *omega_rad_ns : power_to_rabi(p_over_psat.value_or(0.1), r.gamma);
    return SystemParams::make(omega, r.gamma, r.gamma3, ghz_to_rad_ns(omega12_ghz),
                              t2star_ns);
}

std::string env_var_name(const std::string& section, const std::string& key) {
    std::string name = "SPINCOH_" + section + "_" + key;
    std::transform(name.begin(), name.end(), name.begin(),
                   [](unsigned char ch) { return std::toupper(ch); });
    return name;
}

LoadedConfig parse_config(const std::string& text) {
    LoadedConfig out;
    ExperimentConfig& cfg = out.config;
    std::vector<std::string> problems;

    struct Assignment {
        const KeyEntry* entry;
        std::string value;
        std::string where;
    };
    std::vector<Assignment> file_assignments;

    std::istringstream is(text);
    std::string line;
    std::string section = "top";
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') {
                problems.push_back("line " + std::to_string(lineno) +
                                   ": unterminated section header");
                continue;
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            problems.push_back("line " + std::to_string(lineno) + ", col " +
                               std::to_string(t.size()) + ": expected 'key = value'");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const KeyEntry* entry = find_key(section, key);
        if (!entry) {
            problems.push_back("line " + std::to_string(lineno) + ": unknown key '" +
                               section + "." + key + "'");
            continue;
        }
        file_assignments.push_back({entry, value,
                                    "line " + std::to_string(lineno) + ", col " +
                                        std::to_string(eq + 2)});
    }

    std::vector<Assignment> env_assignments;
    for (const KeyEntry& e : schema()) {
        const std::string var = env_var_name(e.section, e.key);
        if (const char* v = std::getenv(var.c_str()))
            env_assignments.push_back({&e, v, var});
    }

    // Preset establishes base values; explicit file keys override it, and
    // environment variables override both.
    std::vector<std::string> seen;
    std::vector<std::string> preset_keys;
    for (const auto& batch : {env_assignments, file_assignments}) {
        for (const Assignment& a : batch) {
            if (a.entry->key != "preset") continue;
            try {
                a.entry->set(cfg, a.value);
            } catch (const std::exception& e) {
                problems.push_back(a.where + ": top.preset: " + e.what());
            }
            seen.push_back("top.preset");
        }
        if (!seen.empty()) break;  // env wins over file for the preset too
    }
    preset_keys = apply_preset(cfg, out.defaults_applied);
    seen.insert(seen.end(), preset_keys.begin(), preset_keys.end());

    for (const Assignment& a : file_assignments) {
        if (a.entry->key == "preset") continue;
        try {
            a.entry->set(cfg, a.value);
            seen.push_back(a.entry->section + "." + a.entry->key);
        } catch (const std::exception& e) {
            problems.push_back(a.where + ": " + a.entry->section + "." + a.entry->key +
                               ": " + e.what());
        }
    }
    for (const Assignment& a : env_assignments) {
        if (a.entry->key == "preset") continue;
        try {
            a.entry->set(cfg, a.value);
            out.env_overrides.push_back(a.where + " -> " + a.entry->section + "." +
                                        a.entry->key);
            seen.push_back(a.entry->section + "." + a.entry->key);
        } catch (const std::exception& e) {
            problems.push_back(a.where + ": " + e.what());
        }
    }

    // Log every key that still carries its default.
    const auto was_seen = [&seen](const std::string& sk) {
        return std::find(seen.begin(), seen.end(), sk) != seen.end();
    };
    // An explicit Rabi frequency replaces the preset's power setting.
    if (cfg.p_over_psat && cfg.omega_rad_ns && was_seen("system.omega_rad_ns") &&
        std::find(preset_keys.begin(), preset_keys.end(), "system.p_over_psat") !=
            preset_keys.end() &&
        std::count(seen.begin(), seen.end(), "system.p_over_psat") == 1)
        cfg.p_over_psat.reset();
    if (!cfg.t2_ns && !cfg.gamma3)
        out.defaults_applied.push_back("system.t2_ns = " +
                                       std::to_string(2.0 * cfg.t1_ns) + " (default 2*T1)");
    if (!cfg.p_over_psat && !cfg.omega_rad_ns) {
        cfg.p_over_psat = 0.1;
        out.defaults_applied.push_back("system.p_over_psat = 0.1 (default)");
    }
    for (const KeyEntry& e : schema()) {
        if (e.present && !e.present(cfg)) continue;
        const std::string sk = e.section + "." + e.key;
        if (sk == "system.t2_ns" || sk == "system.gamma3" || sk == "system.p_over_psat" ||
            sk == "system.omega_rad_ns")
            continue;
        if (!was_seen(sk))
            out.defaults_applied.push_back(sk + " = " + e.get(cfg) + " (default)");
    }

    validate_config(cfg, problems);
    if (!problems.empty()) throw ConfigError(problems);
    return out;
}

LoadedConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ConfigError({"cannot open config file '" + path + "'"});
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str());
}

std::string serialize(const ExperimentConfig& cfg) {
    std::string out = "# spincoh experiment configuration\n";
    std::string section;
    for (const KeyEntry& e : schema()) {
        if (e.present && !e.present(cfg)) continue;
        if (e.section != section) {
            section = e.section;
            if (section != "top") out += "\n[" + section + "]\n";
        }
        out += e.key + " = " + e.get(cfg) + "\n";
    }
    return out;
}

} // namespace spincoh
