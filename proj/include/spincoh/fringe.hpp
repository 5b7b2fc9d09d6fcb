// fringe.hpp — Pulse-sequence windows and reproducible Poissonian fringe records

#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "spincoh/system_params.hpp"
#include "spincoh/visibility.hpp"

namespace spincoh {

struct Window {
    double start_ns = 0.0;
    double length_ns = 3.0;
    bool operator==(const Window&) const = default;
};

enum class PulseMode { SinglePulse, DoublePulse };

struct PulseSequence {
    double prep_ns = 10.0;        // preparation (spin-pumping) pulse
    double excite_ns = 10.0;      // excitation pulse, single-pulse mode
    double rep_period_ns = 52.0;
    Window window{};
    PulseMode mode = PulseMode::SinglePulse;
    double t0_ns = 3.0;           // per-pulse excitation length, double-pulse mode

    void validate() const;
    bool operator==(const PulseSequence&) const = default;
};

struct WindowDecision {
    bool feasible = false;
    double overlap_ns = 0.0;
};

// Single-pulse: the two interferometer arms overlap for excite - delta_t; the
// post-selection window must fit inside. Double-pulse: the second pulse is
// delayed by delta_t to match the long arm, so the overlap is the full t0 and
// only the repetition period limits delta_t.
WindowDecision window_feasible(const PulseSequence& seq, double delta_t_ns);

// N(theta) = mean_rate * (1 + v cos(theta)).
double expected_rate(double visibility, double phase, double mean_rate);

struct FringeRecord {
    std::vector<double> phases;        // rad
    std::vector<std::uint64_t> counts;
    double mean_rate = 0.0;            // expected counts per phase point at v = 0
    double visibility = 0.0;           // model visibility injected at this delay
    double background_rate = 0.0;
    double delta_t_ns = 0.0;
    Window window{};
    VisChannel channel = VisChannel::Diag1;
    std::uint64_t seed = 0;
    std::string rng_id;                // generator/sampler, recorded for reproducibility

    std::string serialize_csv() const;  // phase_rad,counts rows (no header)
};

// Deterministic per (inputs, seed). Point k draws from an independent stream
// seeded seed + k, so records are reproducible under any parallel split.
FringeRecord synthesize_at_visibility(double visibility, std::span<const double> phases,
                                      double mean_rate, std::uint64_t seed,
                                      double background_rate = 0.0);

// Full-pipeline variant: visibility at delta_t from the requested channel.
FringeRecord synthesize(const PulseSequence& seq, const SystemParams& p,
                        std::span<const double> phases, double mean_rate,
                        std::uint64_t seed, VisChannel channel, double delta_t_ns,
                        double background_rate = 0.0);

// Exact Poisson sampling: inversion by sequential search, with additive
// splitting for large means. Uses only the raw 64-bit generator output.
std::uint64_t poisson_sample(double mean, std::mt19937_64& rng);

extern const char* const kFringeRngId;

} // namespace spincoh
