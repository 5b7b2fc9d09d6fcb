// integrator.hpp — Adaptive Dormand–Prince 5(4) integration with absolute error control

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace spincoh {

struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IntegratorOptions {
    double abs_tol = 1e-10;
    double h_init = 0.0;  // 0 -> derived from the first interval
    double h_min = 1e-13;
    std::size_t max_steps = 4000000;
};

// Integrates the autonomous system y' = f(y) and returns y at every grid time.
// t_grid must be ascending; t_grid.front() is the time of y0. Vec needs
// vector-space arithmetic plus cwiseAbs().maxCoeff() (Eigen vectors qualify).
template <typename Vec, typename Rhs>
std::vector<Vec> integrate_at(Rhs&& f, const Vec& y0, std::span<const double> t_grid,
                              const IntegratorOptions& opt = {}) {
    if (t_grid.empty()) return {};
    for (std::size_t i = 1; i < t_grid.size(); ++i)
        if (!(t_grid[i] > t_grid[i - 1]))
            throw std::invalid_argument("integrate_at: time grid must be strictly ascending");

    // Dormand–Prince 5(4) tableau.
    static constexpr double a21 = 1.0 / 5;
    static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                            a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                            a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                            a65 = -5103.0 / 18656;
    static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                            b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // difference between 5th and embedded 4th order weights
    static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                            e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    std::vector<Vec> out;
    out.reserve(t_grid.size());
    out.push_back(y0);

    Vec y = y0;
    double t = t_grid.front();
    double h = opt.h_init;
    std::size_t steps = 0;

    for (std::size_t g = 1; g < t_grid.size(); ++g) {
        const double t_target = t_grid[g];
        if (h <= 0.0) h = 1e-3 * (t_target - t);
        while (t < t_target) {
            if (++steps > opt.max_steps)
                throw IntegrationError("integrate_at: step budget exhausted at t = " +
                                       std::to_string(t));
            const bool clipped = t + h >= t_target;
            const double hs = clipped ? t_target - t : h;

            const Vec k1 = f(y);
            const Vec k2 = f(Vec(y + hs * (a21 * k1)));
            const Vec k3 = f(Vec(y + hs * (a31 * k1 + a32 * k2)));
            const Vec k4 = f(Vec(y + hs * (a41 * k1 + a42 * k2 + a43 * k3)));
            const Vec k5 = f(Vec(y + hs * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
            const Vec k6 =
                f(Vec(y + hs * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
            const Vec y5 = y + hs * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
            const Vec k7 = f(y5);
            const Vec err_v =
                hs * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            const double err = err_v.cwiseAbs().maxCoeff();

            if (err <= opt.abs_tol) {
                t = clipped ? t_target : t + hs;
                y = y5;
            }
            const double scale = err > 0.0
                                     ? std::clamp(0.9 * std::pow(opt.abs_tol / err, 0.2), 0.2, 5.0)
                                     : 5.0;
            const double h_new = hs * scale;
            if (!clipped || err > opt.abs_tol) h = h_new;
            if (h < opt.h_min)
                throw IntegrationError("integrate_at: step size underflow at t = " +
                                       std::to_string(t));
        }
        out.push_back(y);
    }
    return out;
}

} // namespace spincoh
