#include <doctest.h>

#include <cmath>

#include "spincoh/fit.hpp"
#include "spincoh/fringe.hpp"
#include "spincoh/spectral.hpp"

using namespace spincoh;

namespace {

const double kT1 = 0.76;
const double kGamma = 1.0 / kT1;

std::vector<double> phase_scan(int n) {
    std::vector<double> p(n);
    for (int k = 0; k < n; ++k) p[k] = 2.0 * kPi * k / n;
    return p;
}

} // namespace

TEST_CASE("expected rate arithmetic") {
    CHECK(expected_rate(1.0, kPi, 100.0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(expected_rate(0.5, 0.0, 200.0) == doctest::Approx(300.0));
    CHECK(expected_rate(0.0, 1.234, 50.0) == doctest::Approx(50.0));
    CHECK_THROWS_AS(expected_rate(1.2, 0.0, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(expected_rate(0.5, 0.0, -1.0), std::invalid_argument);
}

TEST_CASE("window feasibility for the single-pulse sequence") {
    PulseSequence seq;  // prep 10, excite 10, rep 52, window 3 ns
    const WindowDecision d1 = window_feasible(seq, 3.0);
    CHECK(d1.feasible);
    CHECK(d1.overlap_ns == doctest::Approx(7.0));
    const WindowDecision d2 = window_feasible(seq, 8.0);
    CHECK_FALSE(d2.feasible);  // 10 - 8 < 3
    CHECK(d2.overlap_ns == doctest::Approx(2.0));
}

TEST_CASE("window feasibility for the double-pulse sequence") {
    PulseSequence seq;
    seq.mode = PulseMode::DoublePulse;
    seq.t0_ns = 3.0;
    seq.excite_ns = 3.0;
    seq.window = {0.0, 2.5};
    const WindowDecision d = window_feasible(seq, 25.0);
    CHECK(d.feasible);
    CHECK(d.overlap_ns == doctest::Approx(3.0));
    // repetition period eventually forbids the delay
    CHECK_FALSE(window_feasible(seq, 45.0).feasible);
}

TEST_CASE("single-pulse feasibility is monotone in the delay") {
    PulseSequence seq;
    bool was_infeasible = false;
    for (double dt = 0.0; dt <= 12.0; dt += 0.25) {
        const bool ok = window_feasible(seq, dt).feasible;
        if (was_infeasible) CHECK_FALSE(ok);
        if (!ok) was_infeasible = true;
    }
    CHECK(was_infeasible);
}

TEST_CASE("sequence validation") {
    PulseSequence seq;
    seq.window.length_ns = 12.0;  // longer than the excitation pulse
    CHECK_THROWS_AS(seq.validate(), std::invalid_argument);
    PulseSequence seq2;
    seq2.rep_period_ns = 15.0;  // shorter than prep + excite
    CHECK_THROWS_AS(seq2.validate(), std::invalid_argument);
}

TEST_CASE("synthesis is deterministic and byte-identical per seed") {
    const auto phases = phase_scan(24);
    const FringeRecord a = synthesize_at_visibility(0.368, phases, 500.0, 12345);
    const FringeRecord b = synthesize_at_visibility(0.368, phases, 500.0, 12345);
    CHECK(a.serialize_csv() == b.serialize_csv());
    CHECK(a.rng_id == std::string(kFringeRngId));
    const FringeRecord c = synthesize_at_visibility(0.368, phases, 500.0, 12346);
    CHECK(a.serialize_csv() != c.serialize_csv());
}

TEST_CASE("zero mean rate yields all-zero counts") {
    const auto phases = phase_scan(12);
    const FringeRecord rec = synthesize_at_visibility(0.5, phases, 0.0, 7);
    for (std::uint64_t c : rec.counts) CHECK(c == 0);
}

TEST_CASE("poisson sampler statistics") {
    std::mt19937_64 rng(2024);
    for (double mean : {0.3, 3.0, 40.0, 700.0}) {
        const int n = 20000;
        double sum = 0.0, sum2 = 0.0;
        for (int i = 0; i < n; ++i) {
            const double k = static_cast<double>(poisson_sample(mean, rng));
            sum += k;
            sum2 += k * k;
        }
        const double m = sum / n;
        const double var = sum2 / n - m * m;
        // mean and variance both within 5 standard errors of the target
        CHECK(std::abs(m - mean) < 5.0 * std::sqrt(mean / n));
        CHECK(std::abs(var - mean) < 5.0 * mean * std::sqrt(3.0 / n));
    }
}

TEST_CASE("count means track the expected rate under repetition") {
    const std::vector<double> phases = {0.0, 2.0 * kPi / 3.0};
    const double v = 0.4, n0 = 120.0;
    const int reps = 400;
    for (std::size_t k = 0; k < phases.size(); ++k) {
        double sum = 0.0;
        for (int r = 0; r < reps; ++r) {
            const FringeRecord rec =
                synthesize_at_visibility(v, phases, n0, 1000 + static_cast<std::uint64_t>(r));
            sum += static_cast<double>(rec.counts[k]);
        }
        const double mu = expected_rate(v, phases[k], n0);
        const double se = std::sqrt(mu / reps);
        CHECK(std::abs(sum / reps - mu) < 3.0 * se);
    }
}

TEST_CASE("full-pipeline synthesis: contrast falls between the two Fig-style delays") {
    const SystemParams p = SystemParams::from_lifetimes(
        power_to_rabi(0.1, kGamma), kT1, 2.0 * kT1, ghz_to_rad_ns(22.0), 2.4);
    PulseSequence seq;  // 10 ns excitation, 3 ns window
    const auto phases = phase_scan(24);
    const FringeRecord early =
        synthesize(seq, p, phases, 800.0, 42, VisChannel::Diag1, 0.75);
    const FringeRecord late = synthesize(seq, p, phases, 800.0, 43, VisChannel::Diag1, 3.0);
    // frozen oracle: V_diag1(0.75) = 0.9038, V_diag1(3.0) = 0.2027
    CHECK(early.visibility == doctest::Approx(0.903758).epsilon(1e-4));
    CHECK(late.visibility == doctest::Approx(0.202750).epsilon(1e-4));

    const FitResult fe = fit_fringe(early.phases, early.counts);
    const FitResult fl = fit_fringe(late.phases, late.counts);
    CHECK(fe.param("visibility") > fl.param("visibility"));

    // infeasible window geometry is rejected
    CHECK_THROWS_AS(synthesize(seq, p, phases, 800.0, 44, VisChannel::Diag1, 8.5),
                    std::invalid_argument);
}

TEST_CASE("round trip at the 1/e visibility point recovers within three sigma") {
    const auto phases = phase_scan(24);
    const FringeRecord rec = synthesize_at_visibility(0.368, phases, 500.0, 8712);
    const FitResult fr = fit_fringe(rec.phases, rec.counts);
    CHECK(fr.converged);
    CHECK(std::abs(fr.param("visibility") - 0.368) < 3.0 * fr.sigma("visibility"));
}

TEST_CASE("background-rate hook raises the floor") {
    const auto phases = phase_scan(12);
    const FringeRecord rec = synthesize_at_visibility(1.0, phases, 200.0, 5, 50.0);
    // at phase pi the signal vanishes but the background remains
    double near_pi = 0.0;
    for (std::size_t k = 0; k < phases.size(); ++k)
        if (std::abs(phases[k] - kPi) < 1e-9) near_pi = static_cast<double>(rec.counts[k]);
    CHECK(near_pi > 10.0);  // Poisson(50) is essentially never this low
}
