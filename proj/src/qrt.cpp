#include "spincoh/qrt.hpp"

#include <stdexcept>

#include "spincoh/integrator.hpp"
#include "spincoh/liouvillian.hpp"
#include "spincoh/spectral.hpp"

namespace spincoh {

Vector9c qrt_initial_vector(Channel ch, const DensityMatrix& state) {
    Matrix3c lower = Matrix3c::Zero();
    // sigma_23 = |2><3| (Rayleigh), sigma_13 = |1><3| (Raman)
    lower(ch == Channel::Rayleigh ? 1 : 0, 2) = 1.0;
    return vectorize(lower * state.rho);
}

int qrt_readout_slot(Channel ch) {
    return ch == Channel::Rayleigh ? vec_slot(1, 2) : vec_slot(0, 2);
}

CorrelationTrace g1(Channel ch, const SystemParams& p, std::span<const double> tau_grid,
                    const G1Options& opt) {
    p.validate();
    if (p.omega <= 0.0) throw std::domain_error("g1: requires omega > 0");
    if (tau_grid.empty() || tau_grid.front() < 0.0)
        throw std::invalid_argument("g1: tau grid must be nonnegative");
    for (std::size_t i = 1; i < tau_grid.size(); ++i)
        if (!(tau_grid[i] > tau_grid[i - 1]))
            throw std::invalid_argument("g1: tau grid must be strictly ascending");

    const DensityMatrix anchor = opt.anchor ? *opt.anchor : quasi_steady_state(p);
    const Complex norm = anchor.rho(2, 2);
    if (std::abs(norm) < 1e-14)
        throw std::domain_error("g1: anchor state has no excited population");

    const Liouvillian l = build_liouvillian(p);
    const Vector9c zeta0 = qrt_initial_vector(ch, anchor);

    // Prepend tau = 0 if the caller's grid starts later.
    std::vector<double> grid;
    const bool prepended = tau_grid.front() > 0.0;
    if (prepended) grid.push_back(0.0);
    grid.insert(grid.end(), tau_grid.begin(), tau_grid.end());

    IntegratorOptions iopt;
    iopt.abs_tol = opt.abs_tol;
    const auto rhs = [&l](const Vector9c& y) -> Vector9c { return l.m * y; };
    const std::vector<Vector9c> traj = integrate_at(rhs, zeta0, grid, iopt);

    CorrelationTrace trace;
    trace.channel = ch;
    trace.tau.assign(tau_grid.begin(), tau_grid.end());
    trace.g1.reserve(tau_grid.size());
    const int slot = qrt_readout_slot(ch);
    for (std::size_t k = prepended ? 1 : 0; k < traj.size(); ++k)
        trace.g1.push_back(traj[k](slot) / norm);

    trace.validity_warning = gamma_sp_pumping(p) * tau_grid.back() > 0.5;
    return trace;
}

} // namespace spincoh
