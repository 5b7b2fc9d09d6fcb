// spincoh_cli.cpp — command line front end

#include <cstdio>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "spincoh/integrator.hpp"
#include "spincoh/io.hpp"
#include "spincoh/run.hpp"

namespace {

spincoh::RunContext make_context(const std::string& config_path, const std::string& out_dir,
                                 std::uint64_t seed, bool seed_given, int jobs, bool strict,
                                 bool verbose) {
    spincoh::LoadedConfig loaded;
    if (config_path.empty()) {
        loaded = spincoh::parse_config("");
    } else {
        loaded = spincoh::load_config(config_path);
    }
    if (verbose) {
        for (const std::string& d : loaded.defaults_applied)
            std::cerr << "default: " << d << "\n";
        for (const std::string& e : loaded.env_overrides)
            std::cerr << "env override: " << e << "\n";
    }
    spincoh::RunContext ctx = spincoh::RunContext::from_config(loaded.config);
    if (!out_dir.empty()) ctx.out_dir = out_dir;
    if (seed_given) ctx.cfg.seed = seed;
    ctx.jobs = jobs;
    ctx.strict = strict;
    return ctx;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"spincoh — coherence of Rayleigh and spin-flip Raman scattering from a "
                 "driven Lambda system: simulation, visibility prediction, T2* extraction"};
    app.require_subcommand(1);
    app.fallthrough();  // allow global options after the subcommand name

    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    int jobs = 1;
    bool strict = false;
    bool verbose = false;
    app.add_option("--config", config_path, "configuration file (key = value format)");
    app.add_option("--out", out_dir, "output directory (overrides output.dir)");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed (overrides top-level seed)");
    app.add_option("--jobs", jobs, "worker threads for sweeps")->check(CLI::PositiveNumber);
    app.add_flag("--strict", strict, "treat validity-regime warnings as errors (exit 4)");
    app.add_flag("--verbose", verbose, "log applied defaults and env overrides");

    app.add_subcommand("g1", "first-order correlation traces for both channels");
    app.add_subcommand("visibility", "V_blue and V_diag1 vs delay");
    app.add_subcommand("ratio", "visibility ratio vs delay (T2* extraction input)");
    app.add_subcommand("roots", "characteristic-root spectrum and pumping rate");
    app.add_subcommand("satsweep", "spin-pumping rate vs drive power");
    app.add_subcommand("fringes", "synthesized fringe records at the configured delays");

    auto* fit_cmd = app.add_subcommand("fit", "nonlinear least-squares parameter extraction");
    std::string fit_model = "gaussian";
    std::string fit_input;
    fit_cmd->add_option("--model", fit_model, "gaussian | saturation | fringe");
    fit_cmd->add_option("--input", fit_input, "input CSV produced by another subcommand")
        ->required();

    CLI11_PARSE(app, argc, argv);

    try {
        const spincoh::RunContext ctx =
            make_context(config_path, out_dir, seed, seed_opt->count() > 0, jobs, strict,
                         verbose);
        std::vector<std::string> files;
        if (app.got_subcommand("g1")) files = spincoh::run_g1(ctx);
        else if (app.got_subcommand("visibility")) files = spincoh::run_visibility(ctx);
        else if (app.got_subcommand("ratio")) files = spincoh::run_ratio(ctx);
        else if (app.got_subcommand("roots")) files = spincoh::run_roots(ctx);
        else if (app.got_subcommand("satsweep")) files = spincoh::run_satsweep(ctx);
        else if (app.got_subcommand("fringes")) files = spincoh::run_fringes(ctx);
        else if (app.got_subcommand("fit")) {
            const spincoh::FitResult fr = spincoh::run_fit(ctx, fit_model, fit_input);
            if (!fr.converged) {
                std::cerr << "fit did not converge (gradient norm " << fr.gradient_norm
                          << " after " << fr.iterations << " iterations)\n";
                return spincoh::kExitNumerical;
            }
            files = {"fit_" + fit_model + ".json"};
        }
        for (const std::string& f : files)
            std::cout << (ctx.out_dir / f).string() << "\n";
        return spincoh::kExitOk;
    } catch (const spincoh::ConfigError& e) {
        std::cerr << e.what() << "\n";
        return spincoh::kExitConfig;
    } catch (const spincoh::ValidityError& e) {
        std::cerr << e.what() << "\n";
        return spincoh::kExitValidity;
    } catch (const spincoh::IntegrationError& e) {
        std::cerr << e.what() << "\n";
        return spincoh::kExitNumerical;
    } catch (const std::exception& e) {
        std::cerr << e.what() << "\n";
        return spincoh::kExitNumerical;
    }
}
