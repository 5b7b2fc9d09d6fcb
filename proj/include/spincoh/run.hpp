// run.hpp — Subcommand orchestration: sweeps, artifact emission, manifests

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "spincoh/config.hpp"
#include "spincoh/fit.hpp"

namespace spincoh {

// Raised when the quasi-static validity budget is exceeded under --strict.
struct ValidityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Exit codes used by the CLI.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;
inline constexpr int kExitValidity = 4;

struct RunContext {
    ExperimentConfig cfg;
    std::filesystem::path out_dir;
    int jobs = 1;
    bool strict = false;

    static RunContext from_config(const ExperimentConfig& cfg);
};

// Each run writes its artifact files plus manifest.json into out_dir and
// returns the artifact names (manifest excluded).
std::vector<std::string> run_g1(const RunContext& ctx);
std::vector<std::string> run_visibility(const RunContext& ctx);
std::vector<std::string> run_ratio(const RunContext& ctx);
std::vector<std::string> run_roots(const RunContext& ctx);
std::vector<std::string> run_satsweep(const RunContext& ctx);
std::vector<std::string> run_fringes(const RunContext& ctx);

// model: "gaussian" (ratio CSV), "saturation" (satsweep CSV) or
// "fringe" (fringes CSV). Returns the fit and writes fit_<model>.json.
FitResult run_fit(const RunContext& ctx, const std::string& model,
                  const std::filesystem::path& input_csv);

// Deterministic parallel map: tasks indexed 0..n-1 run on up to `jobs`
// threads; results land in index order regardless of the thread count.
void parallel_for(int n, int jobs, const std::function<void(int)>& task);

} // namespace spincoh
