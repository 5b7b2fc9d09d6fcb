#include <doctest.h>

#include <cmath>
#include <random>

#include "spincoh/fit.hpp"
#include "spincoh/fringe.hpp"
#include "spincoh/spectral.hpp"

using namespace spincoh;

namespace {

// Central finite-difference check of an analytic Jacobian.
void check_jacobian(const ResidualFn& res, const JacobianFn& jac,
                    const Eigen::VectorXd& x, double rel_tol = 1e-6) {
    Eigen::MatrixXd j;
    jac(x, j);
    for (Eigen::Index p = 0; p < x.size(); ++p) {
        const double h = 1e-6 * std::max(1.0, std::abs(x(p)));
        Eigen::VectorXd xp = x, xm = x;
        xp(p) += h;
        xm(p) -= h;
        Eigen::VectorXd rp, rm;
        res(xp, rp);
        res(xm, rm);
        const Eigen::VectorXd fd = (rp - rm) / (2.0 * h);
        const double scale = std::max(1.0, fd.cwiseAbs().maxCoeff());
        CHECK((j.col(p) - fd).cwiseAbs().maxCoeff() < rel_tol * scale);
    }
}

std::vector<double> linspace(double a, double b, int n) {
    std::vector<double> g(n);
    for (int i = 0; i < n; ++i) g[i] = a + (b - a) * i / (n - 1);
    return g;
}

} // namespace

TEST_CASE("gaussian model: exact recovery of noiseless data") {
    const auto tau = linspace(0.0, 5.0, 20);
    std::vector<double> vis(tau.size());
    for (std::size_t k = 0; k < tau.size(); ++k)
        vis[k] = std::exp(-(tau[k] / 2.6) * (tau[k] / 2.6));
    const FitResult fr = fit_gaussian_t2star(tau, vis);
    CHECK(fr.converged);
    CHECK(std::abs(fr.param("t2star") - 2.6) < 1e-6);
    CHECK(std::abs(fr.param("amplitude") - 1.0) < 1e-6);
    CHECK(fr.gradient_norm < 1e-8 * (1.0 + fr.cost));
    CHECK(fr.residual_rms >= 0.0);
}

TEST_CASE("gaussian model: precondition violations") {
    const std::vector<double> tau = {0.0, 1.0, 2.0, 3.0};
    const std::vector<double> vis = {1.0, 0.8, 0.5, 0.2};
    CHECK_THROWS_AS(fit_gaussian_t2star(tau, vis), std::invalid_argument);  // < 5 points

    const auto t5 = linspace(0.0, 4.0, 8);
    std::vector<double> flat(t5.size(), 0.7);
    CHECK_THROWS_AS(fit_gaussian_t2star(t5, flat), std::invalid_argument);  // degenerate

    // grid too short: visibility barely decays
    const auto tshort = linspace(0.0, 0.5, 8);
    std::vector<double> slow(tshort.size());
    for (std::size_t k = 0; k < tshort.size(); ++k)
        slow[k] = std::exp(-(tshort[k] / 2.6) * (tshort[k] / 2.6));
    CHECK_THROWS_AS(fit_gaussian_t2star(tshort, slow), std::invalid_argument);
}

TEST_CASE("saturation model: exact recovery and degenerate input") {
    const double gamma = 1.3158;
    const auto xs = linspace(0.05, 1.0, 9);
    std::vector<double> rates(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k) {
        const double omega = power_to_rabi(xs[k], gamma);
        rates[k] = gamma_sp_closed_form(omega, gamma);
    }
    const FitResult fr = fit_saturation(xs, rates);
    CHECK(fr.converged);
    CHECK(std::abs(fr.param("gamma") - gamma) / gamma < 1e-6);
    // power_scale recovers omega^2 per unit x = gamma^2/2
    CHECK(std::abs(fr.param("power_scale") - 0.5 * gamma * gamma) / (0.5 * gamma * gamma) <
          1e-5);

    const std::vector<double> one = {0.3, 0.3, 0.3, 0.3};
    const std::vector<double> r1 = {0.1, 0.1, 0.1, 0.1};
    CHECK_THROWS_AS(fit_saturation(one, r1), std::invalid_argument);
}

TEST_CASE("saturation model: deep sub-saturation data is flagged") {
    const double gamma = 1.0;
    const std::vector<double> xs = {0.001, 0.002, 0.003, 0.004, 0.005};
    std::vector<double> rates(xs.size());
    for (std::size_t k = 0; k < xs.size(); ++k)
        rates[k] = gamma_sp_closed_form(power_to_rabi(xs[k], gamma), gamma);
    const FitResult fr = fit_saturation(xs, rates);
    CHECK(fr.identifiability_warning);
}

TEST_CASE("fringe model: exact recovery of noiseless counts") {
    const double n0 = 1000.0, v = 0.8, th0 = 0.3;
    std::vector<double> phases(24);
    std::vector<std::uint64_t> counts(24);
    for (int k = 0; k < 24; ++k) {
        phases[k] = 2.0 * kPi * k / 24;
        counts[k] = static_cast<std::uint64_t>(
            std::llround(n0 * (1.0 + v * std::cos(phases[k] - th0))));
    }
    const FitResult fr = fit_fringe(phases, counts);
    CHECK(fr.converged);
    // counts are integers, so rounding bounds the recovery at ~1/(2 N0)
    CHECK(std::abs(fr.param("n0") - n0) < 0.5);
    CHECK(std::abs(fr.param("visibility") - v) < 5e-4);
    CHECK(std::abs(fr.param("theta0") - th0) < 5e-4);
}

TEST_CASE("fringe model: integer-exact counts recover to 1e-6") {
    // phases chosen so the model lands exactly on integers
    const double n0 = 4096.0, v = 0.25, th0 = 0.0;
    const std::vector<double> phases = {0.0,        0.5 * kPi, kPi,
                                        1.5 * kPi,  2.0 * kPi, 2.5 * kPi};
    std::vector<std::uint64_t> counts;
    for (double th : phases)
        counts.push_back(static_cast<std::uint64_t>(
            std::llround(n0 * (1.0 + v * std::cos(th - th0)))));
    const FitResult fr = fit_fringe(phases, counts);
    CHECK(fr.converged);
    CHECK(std::abs(fr.param("n0") - n0) < 1e-6 * n0);
    CHECK(std::abs(fr.param("visibility") - v) < 1e-6);
}

TEST_CASE("fringe model: poisson sample recovered within three sigma") {
    std::vector<double> phases(24);
    for (int k = 0; k < 24; ++k) phases[k] = 2.0 * kPi * k / 24;
    const FringeRecord rec = synthesize_at_visibility(0.5, phases, 500.0, 97531);
    const FitResult fr = fit_fringe(rec.phases, rec.counts);
    CHECK(fr.converged);
    CHECK(std::abs(fr.param("visibility") - 0.5) < 3.0 * fr.sigma("visibility"));
}

TEST_CASE("fringe model: flat counts give visibility consistent with zero") {
    std::vector<double> phases(24);
    for (int k = 0; k < 24; ++k) phases[k] = 2.0 * kPi * k / 24;
    const FringeRecord rec = synthesize_at_visibility(0.0, phases, 400.0, 24680);
    const FitResult fr = fit_fringe(rec.phases, rec.counts);
    CHECK(fr.param("visibility") >= 0.0);
    CHECK(fr.param("visibility") < 3.0 * fr.sigma("visibility"));
}

TEST_CASE("fringe model: precondition violations") {
    std::vector<double> few = {0.0, 1.0, 2.0, 3.0, 4.0};
    std::vector<std::uint64_t> c5 = {10, 12, 9, 11, 10};
    CHECK_THROWS_AS(fit_fringe(few, c5), std::invalid_argument);

    std::vector<double> narrow(8);
    std::vector<std::uint64_t> c8(8, 10);
    for (int k = 0; k < 8; ++k) narrow[k] = 0.4 * k;  // span 2.8 < 1.5*pi
    CHECK_THROWS_AS(fit_fringe(narrow, c8), std::invalid_argument);
}

TEST_CASE("analytic Jacobians match central finite differences") {
    std::mt19937_64 rng(5150);
    std::uniform_real_distribution<double> u(0.0, 1.0);

    // gaussian
    const auto tau = linspace(0.0, 5.0, 15);
    for (int trial = 0; trial < 3; ++trial) {
        const double a = 0.5 + u(rng), t2 = 1.0 + 2.0 * u(rng);
        const ResidualFn res = [&tau, a, t2](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
            r.resize(static_cast<Eigen::Index>(tau.size()));
            for (std::size_t k = 0; k < tau.size(); ++k) {
                const double um = tau[k] / p(1);
                r(static_cast<Eigen::Index>(k)) =
                    p(0) * std::exp(-um * um) - a * std::exp(-(tau[k] / t2) * (tau[k] / t2));
            }
        };
        const JacobianFn jac = [&tau](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
            j.resize(static_cast<Eigen::Index>(tau.size()), 2);
            for (std::size_t k = 0; k < tau.size(); ++k) {
                const double um = tau[k] / p(1);
                const double e = std::exp(-um * um);
                j(static_cast<Eigen::Index>(k), 0) = e;
                j(static_cast<Eigen::Index>(k), 1) = p(0) * e * 2.0 * um * um / p(1);
            }
        };
        Eigen::VectorXd x(2);
        x << 0.8 + 0.4 * u(rng), 1.5 + u(rng);
        check_jacobian(res, jac, x);
    }

    // saturation
    const std::vector<double> xs = {0.05, 0.2, 0.5, 0.8, 1.0};
    const ResidualFn res_s = [&xs](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(xs.size()));
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double cx = p(1) * xs[k];
            r(static_cast<Eigen::Index>(k)) = 0.5 * cx * p(0) / (p(0) * p(0) + 2.0 * cx);
        }
    };
    const JacobianFn jac_s = [&xs](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        j.resize(static_cast<Eigen::Index>(xs.size()), 2);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double x = xs[k];
            const double den = p(0) * p(0) + 2.0 * p(1) * x;
            j(static_cast<Eigen::Index>(k), 0) =
                0.5 * p(1) * x * (2.0 * p(1) * x - p(0) * p(0)) / (den * den);
            j(static_cast<Eigen::Index>(k), 1) = 0.5 * x * p(0) * p(0) * p(0) / (den * den);
        }
    };
    Eigen::VectorXd xsat(2);
    xsat << 1.3, 0.9;
    check_jacobian(res_s, jac_s, xsat);

    // fringe (weighted residuals; fixed synthetic counts)
    std::vector<double> phases(12);
    std::vector<double> counts(12);
    for (int k = 0; k < 12; ++k) {
        phases[k] = 2.0 * kPi * k / 12;
        counts[k] = 480.0 + 60.0 * std::cos(phases[k] - 0.4) + 5.0 * u(rng);
    }
    const ResidualFn res_f = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(12);
        for (int k = 0; k < 12; ++k) {
            const double m = std::max(p(0) * (1.0 + p(1) * std::cos(phases[k] - p(2))), 1e-9);
            r(k) = (counts[k] - m) / std::sqrt(m);
        }
    };
    const JacobianFn jac_f = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        j.resize(12, 3);
        for (int k = 0; k < 12; ++k) {
            const double cosw = std::cos(phases[k] - p(2));
            const double sinw = std::sin(phases[k] - p(2));
            const double m = std::max(p(0) * (1.0 + p(1) * cosw), 1e-9);
            const double common = -(1.0 / std::sqrt(m)) * (1.0 + (counts[k] - m) / (2.0 * m));
            j(k, 0) = common * (1.0 + p(1) * cosw);
            j(k, 1) = common * p(0) * cosw;
            j(k, 2) = common * p(0) * p(1) * sinw;
        }
    };
    Eigen::VectorXd xf(3);
    xf << 470.0, 0.15, 0.3;
    check_jacobian(res_f, jac_f, xf);
}

TEST_CASE("optimizer cost is non-increasing across accepted iterations") {
    const auto tau = linspace(0.0, 6.0, 25);
    std::vector<double> vis(tau.size());
    std::mt19937_64 rng(77);
    std::normal_distribution<double> n(0.0, 0.01);
    for (std::size_t k = 0; k < tau.size(); ++k)
        vis[k] = std::exp(-(tau[k] / 2.0) * (tau[k] / 2.0)) + n(rng);

    std::vector<double> trace;
    LMOptions opt;
    opt.cost_trace = &trace;
    const ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(tau.size()));
        for (std::size_t k = 0; k < tau.size(); ++k) {
            const double um = tau[k] / p(1);
            r(static_cast<Eigen::Index>(k)) = p(0) * std::exp(-um * um) - vis[k];
        }
    };
    const JacobianFn jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        j.resize(static_cast<Eigen::Index>(tau.size()), 2);
        for (std::size_t k = 0; k < tau.size(); ++k) {
            const double um = tau[k] / p(1);
            const double e = std::exp(-um * um);
            j(static_cast<Eigen::Index>(k), 0) = e;
            j(static_cast<Eigen::Index>(k), 1) = p(0) * e * 2.0 * um * um / p(1);
        }
    };
    Eigen::VectorXd x0(2);
    x0 << 0.5, 4.0;  // deliberately poor start
    const FitResult fr = lm_minimize(res, jac, x0, opt);
    CHECK(fr.converged);
    REQUIRE(trace.size() >= 2);
    for (std::size_t k = 1; k < trace.size(); ++k) CHECK(trace[k] <= trace[k - 1]);
}

TEST_CASE("fitter self-consistency across random model draws") {
    std::mt19937_64 rng(31415);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto tau = linspace(0.0, 6.0, 18);
    for (int trial = 0; trial < 20; ++trial) {
        const double a = 0.6 + 0.8 * u(rng);
        const double t2 = 1.0 + 2.5 * u(rng);
        std::vector<double> vis(tau.size());
        for (std::size_t k = 0; k < tau.size(); ++k)
            vis[k] = a * std::exp(-(tau[k] / t2) * (tau[k] / t2));
        const FitResult fr = fit_gaussian_t2star(tau, vis);
        CHECK(std::abs(fr.param("t2star") - t2) / t2 < 1e-6);
        CHECK(std::abs(fr.param("amplitude") - a) / a < 1e-6);
    }
}

TEST_CASE("covariance is symmetric positive semidefinite when reported") {
    const auto tau = linspace(0.0, 5.0, 30);
    std::vector<double> vis(tau.size());
    std::mt19937_64 rng(11);
    std::normal_distribution<double> n(0.0, 0.02);
    for (std::size_t k = 0; k < tau.size(); ++k)
        vis[k] = std::exp(-(tau[k] / 2.4) * (tau[k] / 2.4)) + n(rng);
    const FitResult fr = fit_gaussian_t2star(tau, vis);
    CHECK((fr.covariance - fr.covariance.transpose()).cwiseAbs().maxCoeff() < 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(fr.covariance);
    CHECK(es.eigenvalues().minCoeff() > -1e-14);
}
