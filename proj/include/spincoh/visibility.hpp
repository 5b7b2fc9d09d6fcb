// visibility.hpp — Mach–Zehnder visibilities: ND compensation and Overhauser averaging

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "spincoh/qrt.hpp"
#include "spincoh/system_params.hpp"

namespace spincoh {

enum class VisChannel { Blue, Diag1, Ratio };

struct VisibilityCurve {
    VisChannel channel = VisChannel::Blue;
    std::vector<double> tau;      // ns
    std::vector<double> v;        // fringe visibility in [0, 1]
    std::vector<std::uint8_t> valid;  // 0 where a guard tripped (clamp or division)
    SystemParams params;
    bool validity_warning = false;
};

// Gaussian distribution of Larmor frequencies from the slowly fluctuating
// Overhauser field: mean omega12, sigma = sqrt(2)/T2*.
struct OverhauserDistribution {
    double mean = 0.0;   // rad/ns
    double sigma = 0.0;  // rad/ns
    int order = 64;      // Gauss–Hermite order

    static OverhauserDistribution from_params(const SystemParams& p, int order = 64);
};

// Nodes/weights for integrals against exp(-u^2)/sqrt(pi); weights sum to 1.
struct GaussHermite {
    std::vector<double> nodes;
    std::vector<double> weights;
};
GaussHermite gauss_hermite(int order);

// V_blue(tau) = e^{gamma_sp tau / 2} |g1_Rayleigh(tau)|. The exponential undoes
// the ND-filter balancing of the decaying subspace intensity.
VisibilityCurve v_blue(const SystemParams& p, std::span<const double> tau);

// V_diag1(tau) = e^{gamma_sp tau / 2} |<g1_Raman(tau) e^{i delta_omega tau}>_f|,
// the Gaussian average taken over the Larmor detuning delta_omega around
// omega12 (the mean Larmor phase is common-mode inside the modulus). The
// quadrature result is checked by order doubling at every call.
VisibilityCurve v_diag1(const SystemParams& p, std::span<const double> tau,
                        int quad_order = 64);

// Pointwise V_diag1 / V_blue; approaches exp(-(tau/T2*)^2) in the weak-drive
// limit. Samples with V_blue < 1e-6 are flagged invalid.
VisibilityCurve visibility_ratio(const VisibilityCurve& blue, const VisibilityCurve& diag1);
VisibilityCurve visibility_ratio(const SystemParams& p, std::span<const double> tau,
                                 int quad_order = 64);

inline double gaussian_ratio_model(double tau, double t2star) {
    const double u = tau / t2star;
    return std::exp(-u * u);
}

// Normalization by the measured interference visibility of the excitation
// laser. The simulated drive is ideally monochromatic, so the default is the
// identity; experimental ingestion can slot a measured value in here.
VisibilityCurve apply_laser_normalization(VisibilityCurve c, double laser_visibility = 1.0);

} // namespace spincoh
