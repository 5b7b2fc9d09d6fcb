#include <doctest.h>

#include <cmath>

#include "spincoh/evolve.hpp"
#include "spincoh/spectral.hpp"
#include "test_support.hpp"

using namespace spincoh;
using spincoh::testing::ParamSampler;

namespace {

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

} // namespace

TEST_CASE("pure spontaneous decay without drive matches the closed form") {
    const double gamma = 1.0 / 0.76;
    const SystemParams p = SystemParams::make(0.0, gamma, 0.1);
    const Liouvillian l = build_liouvillian(p);
    const auto grid = linspace(0.0, 5.0, 26);
    const auto traj = evolve(DensityMatrix::pure(3), l, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double decay = std::exp(-gamma * grid[k]);
        CHECK(std::abs(traj[k].rho(2, 2).real() - decay) < 1e-8);
        CHECK(std::abs(traj[k].rho(0, 0).real() - 0.5 * (1.0 - decay)) < 1e-8);
        CHECK(std::abs(traj[k].rho(1, 1).real() - 0.5 * (1.0 - decay)) < 1e-8);
    }
}

TEST_CASE("trace is preserved at 1e-10 for random states and parameters") {
    ParamSampler sampler(201);
    for (int trial = 0; trial < 20; ++trial) {
        const Liouvillian l = build_liouvillian(sampler.draw());
        const auto traj = evolve(sampler.random_pure_state(), l, linspace(0.0, 4.0, 9));
        for (const DensityMatrix& d : traj) CHECK(d.trace_defect() < 1e-10);
    }
}

TEST_CASE("physicality along the trajectory (property, 100 draws)") {
    ParamSampler sampler(202);
    for (int trial = 0; trial < 100; ++trial) {
        const Liouvillian l = build_liouvillian(sampler.draw());
        const auto traj = evolve(sampler.random_pure_state(), l, linspace(0.0, 3.0, 7));
        for (const DensityMatrix& d : traj) {
            CHECK(d.hermiticity_defect() < 1e-10);
            CHECK(d.trace_defect() < 1e-10);
            CHECK(d.min_eigenvalue() > -1e-8);
        }
    }
}

TEST_CASE("generator linearity across mixtures") {
    ParamSampler sampler(203);
    const Liouvillian l = build_liouvillian(sampler.draw());
    const DensityMatrix a = sampler.random_pure_state();
    const DensityMatrix b = sampler.random_pure_state();
    const double alpha = 0.37;
    DensityMatrix mix;
    mix.rho = alpha * a.rho + (1.0 - alpha) * b.rho;

    const auto grid = linspace(0.0, 2.0, 5);
    const auto ta = evolve(a, l, grid);
    const auto tb = evolve(b, l, grid);
    const auto tm = evolve(mix, l, grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const Matrix3c lhs = tm[k].rho;
        const Matrix3c rhs = alpha * ta[k].rho + (1.0 - alpha) * tb[k].rho;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
    }
}

TEST_CASE("converged with respect to tolerance tightening") {
    ParamSampler sampler(204);
    const SystemParams p = sampler.draw();
    const Liouvillian l = build_liouvillian(p);
    const auto grid = linspace(0.0, 4.0, 17);
    EvolveOptions coarse;
    coarse.abs_tol = 1e-10;
    EvolveOptions fine;
    fine.abs_tol = 1e-12;
    const auto tc = evolve(DensityMatrix::pure(2), l, grid, coarse);
    const auto tf = evolve(DensityMatrix::pure(2), l, grid, fine);
    for (std::size_t k = 0; k < grid.size(); ++k)
        CHECK((tc[k].rho - tf[k].rho).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("driven ground state pumps into |1> at the slow asymptotic rate") {
    const double gamma = 1.0;
    const SystemParams p = SystemParams::make(0.1 * gamma, gamma);
    const Liouvillian l = build_liouvillian(p);
    const RateSpectrum spec = decay_rates(p);

    // measure the asymptotic rate of rho22 + rho33 between two late times
    const std::vector<double> grid = {0.0, 40.0, 80.0};
    const auto traj = evolve(DensityMatrix::pure(2), l, grid);
    const auto subspace_pop = [](const DensityMatrix& d) {
        return (d.rho(1, 1) + d.rho(2, 2)).real();
    };
    const double rate =
        std::log(subspace_pop(traj[1]) / subspace_pop(traj[2])) / (grid[2] - grid[1]);
    CHECK(rate == doctest::Approx(spec.slow_root_rate).epsilon(1e-6));
    // the integrated-survival pumping rate agrees to O(omega^2/gamma^2)
    CHECK(rate == doctest::Approx(spec.gamma_sp).epsilon(0.03));
}

TEST_CASE("error paths: bad grids are rejected, never silent") {
    const Liouvillian l = build_liouvillian(SystemParams::make(0.3, 1.0));
    const DensityMatrix rho = DensityMatrix::pure(2);
    CHECK_THROWS_AS(evolve(rho, l, std::vector<double>{1.0, 2.0}), std::invalid_argument);
    CHECK_THROWS_AS(evolve(rho, l, std::vector<double>{0.0, 2.0, 2.0}),
                    std::invalid_argument);
    CHECK_THROWS_AS(evolve(rho, l, std::vector<double>{0.0, 2.0, 1.0}),
                    std::invalid_argument);
}
