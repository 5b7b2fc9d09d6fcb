// evolve.hpp — Time evolution of density matrices under the Lambda-system generator

#pragma once

#include <span>
#include <vector>

#include "spincoh/density_matrix.hpp"
#include "spincoh/integrator.hpp"
#include "spincoh/liouvillian.hpp"

namespace spincoh {

struct EvolveOptions {
    double abs_tol = 1e-10;
    bool check_physical = true;  // verify trace/Hermiticity/positivity at each sample
};

// t_grid must be strictly increasing and start at 0.
std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& l,
                                  std::span<const double> t_grid,
                                  const EvolveOptions& opt = {});

} // namespace spincoh
