#include "spincoh/fringe.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace spincoh {

const char* const kFringeRngId = "mt19937_64/poisson-inversion-split";

void PulseSequence::validate() const {
    std::string err;
    if (!(prep_ns > 0.0) || !(excite_ns > 0.0) || !(t0_ns > 0.0))
        err += "pulse lengths must be > 0; ";
    if (!(window.length_ns > 0.0) || window.start_ns < 0.0)
        err += "window must have positive length and nonnegative start; ";
    const double excitation = mode == PulseMode::SinglePulse ? excite_ns : t0_ns;
    if (window.start_ns + window.length_ns > excitation)
        err += "window must fit inside the excitation pulse; ";
    const double occupied =
        mode == PulseMode::SinglePulse ? prep_ns + excite_ns : prep_ns + 2.0 * t0_ns;
    if (rep_period_ns < occupied) err += "rep_period shorter than the pulse train; ";
    if (!err.empty()) throw std::invalid_argument("PulseSequence: " + err);
}

WindowDecision window_feasible(const PulseSequence& seq, double delta_t_ns) {
    WindowDecision d;
    if (seq.mode == PulseMode::SinglePulse) {
        d.overlap_ns = seq.excite_ns - delta_t_ns;
        d.feasible = d.overlap_ns >= seq.window.length_ns;
    } else {
        d.overlap_ns = seq.t0_ns;
        d.feasible = seq.t0_ns >= seq.window.length_ns &&
                     seq.prep_ns + delta_t_ns + seq.t0_ns <= seq.rep_period_ns;
    }
    if (d.overlap_ns < 0.0) d.overlap_ns = 0.0;
    return d;
}

double expected_rate(double visibility, double phase, double mean_rate) {
    if (visibility < 0.0 || visibility > 1.0)
        throw std::invalid_argument("expected_rate: visibility must be in [0, 1]");
    if (mean_rate < 0.0)
        throw std::invalid_argument("expected_rate: mean_rate must be >= 0");
    return mean_rate * (1.0 + visibility * std::cos(phase));
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa from the raw output; identical across platforms.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::uint64_t poisson_small(double mean, std::mt19937_64& rng) {
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double p = uniform01(rng);
    while (p > limit) {
        ++k;
        p *= uniform01(rng);
    }
    return k;
}

} // namespace

std::uint64_t poisson_sample(double mean, std::mt19937_64& rng) {
    if (!(mean >= 0.0)) throw std::invalid_argument("poisson_sample: mean must be >= 0");
    std::uint64_t k = 0;
    // Poisson(a + b) = Poisson(a) + Poisson(b) for independent draws.
    while (mean > 25.0) {
        k += poisson_small(20.0, rng);
        mean -= 20.0;
    }
    return k + poisson_small(mean, rng);
}

FringeRecord synthesize_at_visibility(double visibility, std::span<const double> phases,
                                      double mean_rate, std::uint64_t seed,
                                      double background_rate) {
    if (background_rate < 0.0)
        throw std::invalid_argument("synthesize: background_rate must be >= 0");
    FringeRecord rec;
    rec.phases.assign(phases.begin(), phases.end());
    rec.counts.resize(phases.size());
    rec.mean_rate = mean_rate;
    rec.visibility = visibility;
    rec.background_rate = background_rate;
    rec.seed = seed;
    rec.rng_id = kFringeRngId;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        std::mt19937_64 rng(seed + k);
        const double mu = expected_rate(visibility, phases[k], mean_rate) + background_rate;
        rec.counts[k] = poisson_sample(mu, rng);
    }
    return rec;
}

FringeRecord synthesize(const PulseSequence& seq, const SystemParams& p,
                        std::span<const double> phases, double mean_rate,
                        std::uint64_t seed, VisChannel channel, double delta_t_ns,
                        double background_rate) {
    seq.validate();
    const WindowDecision wd = window_feasible(seq, delta_t_ns);
    if (!wd.feasible)
        throw std::invalid_argument("synthesize: window infeasible at delta_t = " +
                                    std::to_string(delta_t_ns) + " ns");
    const std::vector<double> tau = {delta_t_ns};
    double v = 0.0;
    if (channel == VisChannel::Blue)
        v = v_blue(p, tau).v[0];
    else if (channel == VisChannel::Diag1)
        v = v_diag1(p, tau).v[0];
    else
        throw std::invalid_argument("synthesize: channel must be Blue or Diag1");

    FringeRecord rec = synthesize_at_visibility(v, phases, mean_rate, seed, background_rate);
    rec.delta_t_ns = delta_t_ns;
    rec.window = seq.window;
    rec.channel = channel;
    return rec;
}

std::string FringeRecord::serialize_csv() const {
    std::string out;
    char buf[64];
    for (std::size_t k = 0; k < phases.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.15g,%llu\n", phases[k],
                      static_cast<unsigned long long>(counts[k]));
        out += buf;
    }
    return out;
}

} // namespace spincoh
