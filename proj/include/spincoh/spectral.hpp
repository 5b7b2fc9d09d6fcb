// spectral.hpp — Decay-rate spectrum, spin-pumping rate, and power/Rabi conversion

#pragma once

#include <array>

#include "spincoh/density_matrix.hpp"
#include "spincoh/liouvillian.hpp"

namespace spincoh {

// roots is matched to the analytic labels, in this order:
//   s1 = 0                                   (stationary mode)
//   s2 ~ -gamma_sp                           (slow optical-pumping root, approximate)
//   s3, s4 ~ -(5/8) gamma ± i omega          (oscillatory pair, omega > gamma regime)
//   s5 = -xi/2                               (xi = gamma + gamma3)
//   s6, s7 = -xi/4 + sqrt((xi/4)^2 - omega^2/4)   (double)
//   s8, s9 = -xi/4 - sqrt((xi/4)^2 - omega^2/4)   (double)
struct RateSpectrum {
    std::array<Complex, 9> roots{};  // numerical eigenvalues, matched to labels
    double gamma_sp = 0.0;           // spin-pumping rate, 1/ns (see gamma_sp_pumping)
    double slow_root_rate = 0.0;     // -Re of the slowest nonzero non-oscillatory root
};

RateSpectrum decay_rates(const SystemParams& p);

std::array<Complex, 9> closed_form_roots(const SystemParams& p);

// Saturation form of the pumping rate: 0.5 omega^2 gamma / (gamma^2 + 2 omega^2).
// Exact for equal branching and zero pure dephasing (see gamma_sp_pumping).
double gamma_sp_closed_form(double omega, double gamma);

// Spin-pumping rate defined as the inverse of the time-integrated population of
// the driven {|2>,|3>} subspace starting from |2><2|, computed by a resolvent
// solve on the generator. Analytically this equals
//   gamma31 * omega^2 / (gamma * xi + 2 omega^2),
// which reduces to gamma_sp_closed_form for the default branching at gamma3 = 0.
// The asymptotic (eigenvalue) decay rate of the subspace exceeds this by
// O(omega^2/gamma^2) relative; both are exposed via RateSpectrum.
double gamma_sp_pumping(const SystemParams& p);

// P/P_sat <-> Rabi frequency. Saturation (P = P_sat) is the drive at which the
// coherently scattered fraction drops to 1/2, i.e. omega^2 = gamma^2/2:
//   omega = gamma * sqrt(0.5 * p_over_psat).
double power_to_rabi(double p_over_psat, double gamma);
double rabi_to_power(double omega, double gamma);

// Quasi-steady state of the decaying subspace: slow eigenvector restricted to
// {|2>,|3>} and trace-normalized. Requires omega > 0.
DensityMatrix quasi_steady_state(const SystemParams& p);

// rho32/rho33 of the quasi-steady state; tends to i*gamma/omega as omega -> 0.
Complex quasi_steady_ratio(const SystemParams& p);

// Newton refinement of a characteristic root using det(sI - M) evaluated by LU
// factorization. Secondary cross-check for the eigenvalue path.
Complex refine_root(const Liouvillian& l, Complex seed);

} // namespace spincoh
