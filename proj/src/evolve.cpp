#include "spincoh/evolve.hpp"

#include <string>

namespace spincoh {

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& l,
                                  std::span<const double> t_grid,
                                  const EvolveOptions& opt) {
    if (t_grid.empty() || t_grid.front() != 0.0)
        throw std::invalid_argument("evolve: t_grid must start at 0");

    IntegratorOptions iopt;
    iopt.abs_tol = opt.abs_tol;
    const auto rhs = [&l](const Vector9c& y) -> Vector9c { return l.m * y; };
    const std::vector<Vector9c> traj = integrate_at(rhs, rho0.vectorized(), t_grid, iopt);

    std::vector<DensityMatrix> out;
    out.reserve(traj.size());
    for (std::size_t k = 0; k < traj.size(); ++k) {
        DensityMatrix d = DensityMatrix::from_vector(traj[k]);
        if (opt.check_physical && !d.is_physical(1e-8, 1e-8, -1e-6))
            throw IntegrationError("evolve: unphysical state at t = " +
                                   std::to_string(t_grid[k]) +
                                   " (trace defect " + std::to_string(d.trace_defect()) + ")");
        out.push_back(std::move(d));
    }
    return out;
}

} // namespace spincoh
