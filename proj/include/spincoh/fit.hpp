// fit.hpp — Levenberg–Marquardt least squares and the three analysis models

#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "spincoh/visibility.hpp"

namespace spincoh {

enum class FitModel { GaussianDecay, Saturation, SinusoidFringe };

struct FitResult {
    FitModel model = FitModel::GaussianDecay;
    std::vector<std::string> names;
    Eigen::VectorXd values;
    Eigen::VectorXd sigmas;       // 1-sigma from the residual-scaled covariance
    Eigen::MatrixXd covariance;
    double residual_rms = 0.0;
    double cost = 0.0;            // 0.5 * sum of squared residuals
    double gradient_norm = 0.0;
    bool converged = false;
    int iterations = 0;
    bool identifiability_warning = false;

    double param(const std::string& name) const;
    double sigma(const std::string& name) const;
};

struct LMOptions {
    int max_iterations = 200;
    double lambda_init = 1e-3;
    double lambda_factor = 10.0;
    double gtol = 1e-8;  // converged when ||J^T r|| < gtol * (1 + cost)
    std::vector<double>* cost_trace = nullptr;  // accepted costs, for diagnostics
};

using ResidualFn = std::function<void(const Eigen::VectorXd&, Eigen::VectorXd&)>;
using JacobianFn = std::function<void(const Eigen::VectorXd&, Eigen::MatrixXd&)>;

FitResult lm_minimize(const ResidualFn& residual, const JacobianFn& jacobian,
                      Eigen::VectorXd x0, const LMOptions& opt = {});

// V(tau) = A exp(-(tau/T2*)^2), params {"amplitude", "t2star"}. Requires at
// least 5 valid samples and a grid that spans the decay (the last visibility
// must have dropped below ~e^{-0.64} of the amplitude).
FitResult fit_gaussian_t2star(std::span<const double> tau, std::span<const double> vis);
FitResult fit_gaussian_t2star(const VisibilityCurve& ratio_curve);

// rate(x) = 0.5 * (c x) * G / (G^2 + 2 c x) with x the P/P_sat proxy,
// params {"gamma", "power_scale"}; power_scale c is the squared Rabi frequency
// per unit x. Requires >= 4 distinct powers.
FitResult fit_saturation(std::span<const double> powers, std::span<const double> rates);

// N(theta) = N0 (1 + V cos(theta - theta0)), params {"n0", "visibility",
// "theta0"}; Poisson-weighted (model-variance) least squares. Requires >= 6
// points covering a phase span of at least 1.5*pi.
FitResult fit_fringe(std::span<const double> phases, std::span<const std::uint64_t> counts);

} // namespace spincoh
