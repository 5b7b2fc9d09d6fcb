// qrt.hpp — Two-time first-order correlations via the quantum regression theorem

#pragma once

#include <span>
#include <vector>

#include "spincoh/density_matrix.hpp"
#include "spincoh/system_params.hpp"

namespace spincoh {

// Rayleigh: elastic channel on the driven transition,
//   g1(tau) = <sigma_32(t+tau) sigma_23(t)> / <sigma_33(t)>.
// Raman: spin-flip channel,
//   g1(tau) = <sigma_31(t+tau) sigma_13(t)> / <sigma_33(t)>.
enum class Channel { Rayleigh, Raman };

struct CorrelationTrace {
    Channel channel = Channel::Rayleigh;
    std::vector<double> tau;  // ns, ascending, nonnegative
    std::vector<Complex> g1;
    // Set when gamma_sp * tau_max exceeds the quasi-static budget of 0.5.
    bool validity_warning = false;
};

struct G1Options {
    double abs_tol = 1e-10;
    // Anchor state at the early time t; defaults to the quasi-steady state.
    const DensityMatrix* anchor = nullptr;
};

// Initial two-time vector vec(sigma_23 rho) or vec(sigma_13 rho); the quantum
// regression theorem evolves it under the same generator as vec(rho). Exactly
// three slots can be nonzero per channel, holding <sigma_13>, <sigma_23>,
// <sigma_33> read from the anchor state.
Vector9c qrt_initial_vector(Channel ch, const DensityMatrix& state);

// vec slot read out after evolution: X_23 for Rayleigh, X_13 for Raman.
int qrt_readout_slot(Channel ch);

CorrelationTrace g1(Channel ch, const SystemParams& p, std::span<const double> tau_grid,
                    const G1Options& opt = {});

} // namespace spincoh
