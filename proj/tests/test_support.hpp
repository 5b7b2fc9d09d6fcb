// test_support.hpp — shared helpers and oracles for the unit tests

#pragma once

#include <complex>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>

#include "spincoh/liouvillian.hpp"
#include "spincoh/qrt.hpp"
#include "spincoh/spectral.hpp"

namespace spincoh::testing {

// The generator written out entry by entry with xi = gamma + gamma3, as an
// independent cross-check of the Lindblad assembly in build_liouvillian.
inline Matrix9c reference_generator(const SystemParams& p) {
    const Complex ih(0.0, 0.5 * p.omega);  // i*Omega/2
    const double xi = p.gamma + p.gamma3;
    Matrix9c m = Matrix9c::Zero();
    // slots: 0 rho11, 1 rho12, 2 rho13, 3 rho21, 4 rho22, 5 rho23,
    //        6 rho31, 7 rho32, 8 rho33
    m(0, 8) = p.gamma31;
    m(1, 2) = -ih;
    m(2, 1) = -ih;
    m(2, 2) = -0.5 * xi;
    m(3, 6) = ih;
    m(4, 5) = -ih;
    m(4, 7) = ih;
    m(4, 8) = p.gamma32;
    m(5, 4) = -ih;
    m(5, 5) = -0.5 * xi;
    m(5, 8) = ih;
    m(6, 3) = ih;
    m(6, 6) = -0.5 * xi;
    m(7, 4) = ih;
    m(7, 7) = -0.5 * xi;
    m(7, 8) = -ih;
    m(8, 5) = ih;
    m(8, 7) = -ih;
    m(8, 8) = -p.gamma;
    return m;
}

// Eigendecomposition (Laplace partial-fraction) route for g1: independent of
// the adaptive integrator used by the production path.
inline std::vector<Complex> g1_eigen_route(Channel ch, const SystemParams& p,
                                           const std::vector<double>& taus,
                                           const DensityMatrix* anchor_in = nullptr) {
    const Liouvillian l = build_liouvillian(p);
    Eigen::ComplexEigenSolver<Matrix9c> es(l.m, true);
    const DensityMatrix anchor = anchor_in ? *anchor_in : quasi_steady_state(p);
    const Vector9c z0 = qrt_initial_vector(ch, anchor);
    const Vector9c coeff = es.eigenvectors().fullPivLu().solve(z0);
    const int slot = qrt_readout_slot(ch);
    const Complex norm = anchor.rho(2, 2);

    std::vector<Complex> out;
    out.reserve(taus.size());
    for (double t : taus) {
        Complex g = 0.0;
        for (int k = 0; k < 9; ++k)
            g += es.eigenvectors()(slot, k) * std::exp(es.eigenvalues()(k) * t) * coeff(k);
        out.push_back(g / norm);
    }
    return out;
}

// Random valid parameter draws. Keeps omega away from the critically damped
// point omega = xi/2 where the ground-coherence block is defective and
// eigenvalue accuracy degrades to sqrt(machine epsilon).
struct ParamSampler {
    std::mt19937_64 rng;
    explicit ParamSampler(std::uint64_t seed) : rng(seed) {}

    SystemParams draw(double omega_lo = 0.05, double omega_hi = 1.5) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        const double gamma = 0.5 + 1.5 * u(rng);
        const double gamma3 = 0.5 * gamma * u(rng);
        const double xi = gamma + gamma3;
        double omega = 0.0;
        do {
            omega = (omega_lo + (omega_hi - omega_lo) * u(rng)) * gamma;
        } while (std::abs(omega - 0.5 * xi) < 0.03 * gamma);
        const double split = u(rng);
        SystemParams p;
        p.omega = omega;
        p.gamma = gamma;
        p.gamma31 = gamma * (0.2 + 0.6 * split);
        p.gamma32 = gamma - p.gamma31;
        p.gamma3 = gamma3;
        p.omega12 = 2.0 * kPi * 22.0;
        p.t2star = 0.5 + 3.0 * u(rng);
        return p;
    }

    DensityMatrix random_pure_state() {
        std::normal_distribution<double> n(0.0, 1.0);
        Eigen::Vector3cd psi;
        for (int i = 0; i < 3; ++i) psi(i) = Complex(n(rng), n(rng));
        psi.normalize();
        return {psi * psi.adjoint()};
    }
};

} // namespace spincoh::testing
