#include "spincoh/run.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include <json.hpp>

#include "spincoh/io.hpp"
#include "spincoh/spectral.hpp"
#include "spincoh/visibility.hpp"

namespace spincoh {

namespace {

std::string config_hash(const ExperimentConfig& cfg) {
    return hex64(fnv1a64(serialize(cfg)));
}

std::vector<std::string> base_meta(const RunContext& ctx, const std::string& what) {
    return {
        "artifact: " + what,
        "config_hash: " + config_hash(ctx.cfg),
        "seed: " + std::to_string(ctx.cfg.seed),
        "units: times ns, rates 1/ns, angular frequencies rad/ns, phases rad",
    };
}

void finish(const RunContext& ctx, const std::string& command,
            const std::vector<std::string>& files) {
    Manifest m;
    m.command = command;
    m.config_hash = config_hash(ctx.cfg);
    m.seed = ctx.cfg.seed;
    for (const std::string& f : files) m.add(ctx.out_dir, f);
    m.write(ctx.out_dir);
}

void enforce_validity(const RunContext& ctx, bool warned, const std::string& where) {
    if (ctx.strict && warned)
        throw ValidityError(where + ": gamma_sp * tau_max exceeds the quasi-static "
                                    "budget (strict mode)");
}

nlohmann::json fit_to_json(const FitResult& fr) {
    nlohmann::json j;
    j["model"] = fr.model == FitModel::GaussianDecay  ? "gaussian"
                 : fr.model == FitModel::Saturation   ? "saturation"
                                                      : "fringe";
    nlohmann::json params = nlohmann::json::object();
    for (std::size_t i = 0; i < fr.names.size(); ++i) {
        params[fr.names[i]] = {{"value", fr.values(static_cast<Eigen::Index>(i))},
                               {"sigma", fr.sigmas(static_cast<Eigen::Index>(i))}};
    }
    j["params"] = params;
    j["residual_rms"] = fr.residual_rms;
    j["cost"] = fr.cost;
    j["gradient_norm"] = fr.gradient_norm;
    j["converged"] = fr.converged;
    j["iterations"] = fr.iterations;
    j["identifiability_warning"] = fr.identifiability_warning;
    std::vector<std::vector<double>> cov(fr.covariance.rows());
    for (Eigen::Index r = 0; r < fr.covariance.rows(); ++r)
        for (Eigen::Index c = 0; c < fr.covariance.cols(); ++c)
            cov[r].push_back(fr.covariance(r, c));
    j["covariance"] = cov;
    return j;
}

} // namespace

RunContext RunContext::from_config(const ExperimentConfig& cfg) {
    RunContext ctx;
    ctx.cfg = cfg;
    ctx.out_dir = cfg.out_dir;
    return ctx;
}

void parallel_for(int n, int jobs, const std::function<void(int)>& task) {
    if (n <= 0) return;
    const int workers = std::max(1, std::min(jobs, n));
    if (workers == 1) {
        for (int i = 0; i < n; ++i) task(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) task(i);
        });
    for (std::thread& t : pool) t.join();
}

std::vector<std::string> run_g1(const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const SystemParams p = ctx.cfg.system_params();
    const std::vector<double> tau = ctx.cfg.tau.build();

    std::vector<std::string> files;
    const struct {
        Channel ch;
        const char* name;
    } channels[2] = {{Channel::Rayleigh, "g1_rayleigh.csv"}, {Channel::Raman, "g1_raman.csv"}};
    for (const auto& [ch, name] : channels) {
        const CorrelationTrace t = g1(ch, p, tau);
        enforce_validity(ctx, t.validity_warning, "g1");
        CsvTable csv;
        csv.meta = base_meta(ctx, ch == Channel::Rayleigh ? "g1 rayleigh" : "g1 raman");
        if (t.validity_warning)
            csv.meta.push_back("warning: gamma_sp * tau_max > 0.5 (quasi-static budget)");
        csv.columns = {"tau_ns", "re_g1", "im_g1", "abs_g1"};
        for (std::size_t k = 0; k < t.tau.size(); ++k)
            csv.rows.push_back({t.tau[k], t.g1[k].real(), t.g1[k].imag(), std::abs(t.g1[k])});
        write_text_file(ctx.out_dir / name, csv.serialize());
        files.push_back(name);
    }
    finish(ctx, "g1", files);
    return files;
}

namespace {

std::vector<std::string> emit_visibility(const RunContext& ctx, const std::string& command,
                                         const std::string& filename) {
    std::filesystem::create_directories(ctx.out_dir);
    const SystemParams p = ctx.cfg.system_params();
    const std::vector<double> tau = ctx.cfg.tau.build();

    const VisibilityCurve blue = v_blue(p, tau);
    const VisibilityCurve diag = v_diag1(p, tau, ctx.cfg.quad_order);
    const VisibilityCurve ratio = visibility_ratio(blue, diag);
    enforce_validity(ctx, ratio.validity_warning, command);

    CsvTable csv;
    csv.meta = base_meta(ctx, command);
    csv.meta.push_back("t2star_ns: " + std::to_string(p.t2star));
    if (ratio.validity_warning)
        csv.meta.push_back("warning: gamma_sp * tau_max > 0.5 (quasi-static budget)");
    csv.columns = {"tau_ns", "v_blue", "v_diag1", "ratio", "model_gaussian", "valid"};
    for (std::size_t k = 0; k < tau.size(); ++k)
        csv.rows.push_back({tau[k], blue.v[k], diag.v[k], ratio.v[k],
                            gaussian_ratio_model(tau[k], p.t2star),
                            static_cast<double>(ratio.valid[k])});
    write_text_file(ctx.out_dir / filename, csv.serialize());
    const std::vector<std::string> files = {filename};
    finish(ctx, command, files);
    return files;
}

} // namespace

std::vector<std::string> run_visibility(const RunContext& ctx) {
    return emit_visibility(ctx, "visibility", "visibility.csv");
}

std::vector<std::string> run_ratio(const RunContext& ctx) {
    return emit_visibility(ctx, "ratio", "ratio.csv");
}

std::vector<std::string> run_roots(const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const SystemParams p = ctx.cfg.system_params();
    const RateSpectrum spec = decay_rates(p);
    const std::array<Complex, 9> closed = closed_form_roots(p);

    CsvTable csv;
    csv.meta = base_meta(ctx, "characteristic roots");
    csv.columns = {"label", "re_s", "im_s", "re_closed_form", "im_closed_form"};
    for (int i = 0; i < 9; ++i)
        csv.rows.push_back({static_cast<double>(i + 1), spec.roots[i].real(),
                            spec.roots[i].imag(), closed[i].real(), closed[i].imag()});
    write_text_file(ctx.out_dir / "roots.csv", csv.serialize());

    nlohmann::json j;
    j["gamma_sp"] = spec.gamma_sp;
    j["slow_root_rate"] = spec.slow_root_rate;
    j["gamma_sp_closed_form"] = gamma_sp_closed_form(p.omega, p.gamma);
    j["roots"] = nlohmann::json::array();
    for (int i = 0; i < 9; ++i)
        j["roots"].push_back({{"label", "s" + std::to_string(i + 1)},
                              {"re", spec.roots[i].real()},
                              {"im", spec.roots[i].imag()}});
    write_text_file(ctx.out_dir / "roots.json", j.dump(2) + "\n");

    const std::vector<std::string> files = {"roots.csv", "roots.json"};
    finish(ctx, "roots", files);
    return files;
}

std::vector<std::string> run_satsweep(const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const SystemParams base = ctx.cfg.system_params();
    const std::vector<double>& xs = ctx.cfg.powers;

    std::vector<double> gsp(xs.size()), closed(xs.size()), omegas(xs.size());
    parallel_for(static_cast<int>(xs.size()), ctx.jobs, [&](int i) {
        SystemParams p = base;
        p.omega = power_to_rabi(xs[i], base.gamma);
        omegas[i] = p.omega;
        gsp[i] = gamma_sp_pumping(p);
        closed[i] = gamma_sp_closed_form(p.omega, p.gamma);
    });

    CsvTable csv;
    csv.meta = base_meta(ctx, "spin-pumping saturation sweep");
    csv.columns = {"p_over_psat", "omega_rad_ns", "gamma_sp", "gamma_sp_closed_form"};
    for (std::size_t i = 0; i < xs.size(); ++i)
        csv.rows.push_back({xs[i], omegas[i], gsp[i], closed[i]});
    write_text_file(ctx.out_dir / "satsweep.csv", csv.serialize());

    const std::vector<std::string> files = {"satsweep.csv"};
    finish(ctx, "satsweep", files);
    return files;
}

std::vector<std::string> run_fringes(const RunContext& ctx) {
    std::filesystem::create_directories(ctx.out_dir);
    const SystemParams p = ctx.cfg.system_params();
    const VisChannel channel =
        ctx.cfg.fringe_channel == "blue" ? VisChannel::Blue : VisChannel::Diag1;

    std::vector<double> phases(ctx.cfg.phase_points);
    for (int k = 0; k < ctx.cfg.phase_points; ++k)
        phases[k] = 2.0 * kPi * k / ctx.cfg.phase_points;

    const int n = static_cast<int>(ctx.cfg.delta_ts_ns.size());
    std::vector<FringeRecord> records(n);
    parallel_for(n, ctx.jobs, [&](int i) {
        records[i] = synthesize(ctx.cfg.sequence, p, phases, ctx.cfg.mean_rate,
                                ctx.cfg.seed + static_cast<std::uint64_t>(i) * 1000003ull,
                                channel, ctx.cfg.delta_ts_ns[i]);
    });

    std::vector<std::string> files;
    for (int i = 0; i < n; ++i) {
        const FringeRecord& rec = records[i];
        char tag[32];
        std::snprintf(tag, sizeof(tag), "%g", rec.delta_t_ns);
        const std::string stem = "fringes_dt" + std::string(tag);

        CsvTable csv;
        csv.meta = base_meta(ctx, "fringe record");
        csv.meta.push_back("delta_t_ns: " + std::to_string(rec.delta_t_ns));
        csv.columns = {"phase_rad", "counts"};
        for (std::size_t k = 0; k < rec.phases.size(); ++k)
            csv.rows.push_back({rec.phases[k], static_cast<double>(rec.counts[k])});
        write_text_file(ctx.out_dir / (stem + ".csv"), csv.serialize());

        nlohmann::json j;
        j["delta_t_ns"] = rec.delta_t_ns;
        j["channel"] = ctx.cfg.fringe_channel;
        j["visibility_model"] = rec.visibility;
        j["mean_rate"] = rec.mean_rate;
        j["background_rate"] = rec.background_rate;
        j["window"] = {{"start_ns", rec.window.start_ns}, {"length_ns", rec.window.length_ns}};
        j["seed"] = rec.seed;
        j["rng"] = rec.rng_id;
        j["phase_points"] = rec.phases.size();
        j["config_hash"] = config_hash(ctx.cfg);
        write_text_file(ctx.out_dir / (stem + ".json"), j.dump(2) + "\n");

        files.push_back(stem + ".csv");
        files.push_back(stem + ".json");
    }
    finish(ctx, "fringes", files);
    return files;
}

FitResult run_fit(const RunContext& ctx, const std::string& model,
                  const std::filesystem::path& input_csv) {
    std::filesystem::create_directories(ctx.out_dir);
    const CsvData data = read_csv(input_csv);
    FitResult fr;
    nlohmann::json extra;
    if (model == "gaussian") {
        const std::vector<double> tau = data.column("tau_ns");
        const std::vector<double> ratio = data.column("ratio");
        const std::vector<double> valid = data.column("valid");
        std::vector<double> t, v;
        for (std::size_t k = 0; k < tau.size(); ++k)
            if (valid[k] != 0.0) {
                t.push_back(tau[k]);
                v.push_back(ratio[k]);
            }
        fr = fit_gaussian_t2star(t, v);
        // Fixed-amplitude convention reported alongside the floated fit.
        const auto res_fixed = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
            r.resize(static_cast<Eigen::Index>(t.size()));
            for (std::size_t k = 0; k < t.size(); ++k) {
                const double u = t[k] / p(0);
                r(static_cast<Eigen::Index>(k)) = std::exp(-u * u) - v[k];
            }
        };
        const auto jac_fixed = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
            j.resize(static_cast<Eigen::Index>(t.size()), 1);
            for (std::size_t k = 0; k < t.size(); ++k) {
                const double u = t[k] / p(0);
                j(static_cast<Eigen::Index>(k), 0) = std::exp(-u * u) * 2.0 * u * u / p(0);
            }
        };
        Eigen::VectorXd x0(1);
        x0 << fr.param("t2star");
        const FitResult fixed = lm_minimize(res_fixed, jac_fixed, x0);
        extra["t2star_amplitude_fixed"] = {{"value", fixed.values(0)},
                                           {"sigma", fixed.sigmas(0)},
                                           {"converged", fixed.converged}};
    } else if (model == "saturation") {
        fr = fit_saturation(data.column("p_over_psat"), data.column("gamma_sp"));
    } else if (model == "fringe") {
        const std::vector<double> phases = data.column("phase_rad");
        const std::vector<double> counts_d = data.column("counts");
        std::vector<std::uint64_t> counts(counts_d.size());
        for (std::size_t k = 0; k < counts_d.size(); ++k)
            counts[k] = static_cast<std::uint64_t>(std::llround(counts_d[k]));
        fr = fit_fringe(phases, counts);
    } else {
        throw ConfigError({"fit: unknown model '" + model +
                           "' (expected gaussian, saturation or fringe)"});
    }

    nlohmann::json j = fit_to_json(fr);
    j["input"] = input_csv.string();
    if (!extra.empty()) j["diagnostics"] = extra;
    const std::string name = "fit_" + model + ".json";
    write_text_file(ctx.out_dir / name, j.dump(2) + "\n");
    finish(ctx, "fit", {name});
    return fr;
}

} // namespace spincoh
