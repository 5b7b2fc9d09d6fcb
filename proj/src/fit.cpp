#include "spincoh/fit.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace spincoh {

double FitResult::param(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return values(static_cast<Eigen::Index>(i));
    throw std::out_of_range("FitResult: no parameter named " + name);
}

double FitResult::sigma(const std::string& name) const {
    for (std::size_t i = 0; i < names.size(); ++i)
        if (names[i] == name) return sigmas(static_cast<Eigen::Index>(i));
    throw std::out_of_range("FitResult: no parameter named " + name);
}

FitResult lm_minimize(const ResidualFn& residual, const JacobianFn& jacobian,
                      Eigen::VectorXd x, const LMOptions& opt) {
    FitResult fr;
    Eigen::VectorXd r;
    Eigen::MatrixXd j;
    residual(x, r);
    jacobian(x, j);
    const Eigen::Index n = r.size();
    const Eigen::Index np = x.size();

    double cost = 0.5 * r.squaredNorm();
    double lambda = opt.lambda_init;
    if (opt.cost_trace) opt.cost_trace->push_back(cost);

    Eigen::VectorXd g = j.transpose() * r;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        if (g.norm() < opt.gtol * (1.0 + cost)) break;

        Eigen::MatrixXd a = j.transpose() * j;
        const double diag_floor = 1e-12 * (a.trace() / static_cast<double>(np) + 1e-300);
        bool accepted = false;
        for (int tries = 0; tries < 40 && !accepted; ++tries) {
            Eigen::MatrixXd damped = a;
            for (Eigen::Index d = 0; d < np; ++d)
                damped(d, d) += lambda * std::max(a(d, d), diag_floor);
            const Eigen::VectorXd step = damped.ldlt().solve(-g);
            const Eigen::VectorXd x_try = x + step;
            Eigen::VectorXd r_try;
            residual(x_try, r_try);
            const double cost_try = 0.5 * r_try.squaredNorm();
            if (std::isfinite(cost_try) && cost_try < cost) {
                x = x_try;
                r = r_try;
                cost = cost_try;
                jacobian(x, j);
                g = j.transpose() * r;
                lambda = std::max(lambda / opt.lambda_factor, 1e-14);
                accepted = true;
                if (opt.cost_trace) opt.cost_trace->push_back(cost);
            } else {
                lambda *= opt.lambda_factor;
            }
        }
        if (!accepted) break;  // stalled; convergence decided by the gradient test
    }

    fr.values = x;
    fr.cost = cost;
    fr.gradient_norm = g.norm();
    fr.iterations = it;
    fr.converged = fr.gradient_norm < opt.gtol * (1.0 + cost);
    fr.residual_rms = n > 0 ? std::sqrt(2.0 * cost / static_cast<double>(n)) : 0.0;

    // Residual-variance-scaled covariance.
    fr.covariance = Eigen::MatrixXd::Zero(np, np);
    fr.sigmas = Eigen::VectorXd::Zero(np);
    if (n > np) {
        const double s2 = 2.0 * cost / static_cast<double>(n - np);
        const Eigen::MatrixXd a = j.transpose() * j;
        const Eigen::MatrixXd inv = a.ldlt().solve(Eigen::MatrixXd::Identity(np, np));
        fr.covariance = s2 * 0.5 * (inv + inv.transpose());
        for (Eigen::Index d = 0; d < np; ++d)
            fr.sigmas(d) = std::sqrt(std::max(fr.covariance(d, d), 0.0));
    }
    return fr;
}

FitResult fit_gaussian_t2star(std::span<const double> tau, std::span<const double> vis) {
    if (tau.size() != vis.size())
        throw std::invalid_argument("fit_gaussian_t2star: size mismatch");
    if (tau.size() < 5)
        throw std::invalid_argument("fit_gaussian_t2star: need at least 5 samples");

    const double vmax = *std::max_element(vis.begin(), vis.end());
    const double vmin = *std::min_element(vis.begin(), vis.end());
    if (!(vmax > 0.0) || vmax - vmin < 1e-12 * std::max(vmax, 1.0))
        throw std::invalid_argument("fit_gaussian_t2star: degenerate (constant) visibilities");
    if (vis.back() > 0.55 * vmax)
        throw std::invalid_argument(
            "fit_gaussian_t2star: tau grid does not span the Gaussian decay");

    // Initializer: amplitude from the peak, T2* from the e^{-1} crossing.
    const double a0 = vmax;
    double t0 = tau.back();
    const double target = a0 / std::exp(1.0);
    for (std::size_t k = 1; k < tau.size(); ++k) {
        if (vis[k] <= target) {
            const double f = (vis[k - 1] - target) / (vis[k - 1] - vis[k] + 1e-300);
            t0 = tau[k - 1] + f * (tau[k] - tau[k - 1]);
            break;
        }
    }

    const std::vector<double> ts(tau.begin(), tau.end());
    const std::vector<double> vs(vis.begin(), vis.end());
    const auto model = [&ts](const Eigen::VectorXd& p, std::size_t k) {
        const double u = ts[k] / p(1);
        return p(0) * std::exp(-u * u);
    };
    const ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(ts.size()));
        for (std::size_t k = 0; k < ts.size(); ++k)
            r(static_cast<Eigen::Index>(k)) = model(p, k) - vs[k];
    };
    const JacobianFn jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        j.resize(static_cast<Eigen::Index>(ts.size()), 2);
        for (std::size_t k = 0; k < ts.size(); ++k) {
            const double u = ts[k] / p(1);
            const double e = std::exp(-u * u);
            j(static_cast<Eigen::Index>(k), 0) = e;
            j(static_cast<Eigen::Index>(k), 1) = p(0) * e * 2.0 * u * u / p(1);
        }
    };

    Eigen::VectorXd x0(2);
    x0 << a0, std::max(t0, 1e-3);
    FitResult fr = lm_minimize(res, jac, x0);
    fr.model = FitModel::GaussianDecay;
    fr.names = {"amplitude", "t2star"};
    return fr;
}

FitResult fit_gaussian_t2star(const VisibilityCurve& c) {
    std::vector<double> tau, vis;
    for (std::size_t k = 0; k < c.tau.size(); ++k) {
        if (!c.valid[k]) continue;
        tau.push_back(c.tau[k]);
        vis.push_back(c.v[k]);
    }
    return fit_gaussian_t2star(tau, vis);
}

FitResult fit_saturation(std::span<const double> powers, std::span<const double> rates) {
    if (powers.size() != rates.size())
        throw std::invalid_argument("fit_saturation: size mismatch");
    const std::set<double> distinct(powers.begin(), powers.end());
    if (distinct.size() < 4)
        throw std::invalid_argument("fit_saturation: need at least 4 distinct powers");
    for (double x : powers)
        if (!(x > 0.0)) throw std::invalid_argument("fit_saturation: powers must be > 0");

    const std::vector<double> xs(powers.begin(), powers.end());
    const std::vector<double> ys(rates.begin(), rates.end());
    const ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(xs.size()));
        const double gm = p(0), c = p(1);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double cx = c * xs[k];
            r(static_cast<Eigen::Index>(k)) = 0.5 * cx * gm / (gm * gm + 2.0 * cx) - ys[k];
        }
    };
    const JacobianFn jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        j.resize(static_cast<Eigen::Index>(xs.size()), 2);
        const double gm = p(0), c = p(1);
        for (std::size_t k = 0; k < xs.size(); ++k) {
            const double x = xs[k];
            const double den = gm * gm + 2.0 * c * x;
            j(static_cast<Eigen::Index>(k), 0) = 0.5 * c * x * (2.0 * c * x - gm * gm) / (den * den);
            j(static_cast<Eigen::Index>(k), 1) = 0.5 * x * gm * gm * gm / (den * den);
        }
    };

    // Seed: ceiling ~ gamma/4 from the largest rate, slope c/(2 gamma) at small x.
    const double rate_max = *std::max_element(ys.begin(), ys.end());
    std::size_t k_min = 0;
    for (std::size_t k = 1; k < xs.size(); ++k)
        if (xs[k] < xs[k_min]) k_min = k;
    const double g0 = std::max(4.0 * rate_max, 1e-6);
    const double c0 = std::max(2.0 * g0 * ys[k_min] / xs[k_min], 1e-9);
    Eigen::VectorXd x0(2);
    x0 << g0, c0;
    FitResult fr = lm_minimize(res, jac, x0);
    fr.model = FitModel::Saturation;
    fr.names = {"gamma", "power_scale"};
    // All powers far below saturation leave the ceiling unconstrained.
    const double xmax = *std::max_element(xs.begin(), xs.end());
    if (2.0 * fr.values(1) * xmax < 0.1 * fr.values(0) * fr.values(0))
        fr.identifiability_warning = true;
    return fr;
}

FitResult fit_fringe(std::span<const double> phases, std::span<const std::uint64_t> counts) {
    if (phases.size() != counts.size())
        throw std::invalid_argument("fit_fringe: size mismatch");
    if (phases.size() < 6)
        throw std::invalid_argument("fit_fringe: need at least 6 phase points");
    const auto [lo, hi] = std::minmax_element(phases.begin(), phases.end());
    if (*hi - *lo < 1.5 * kPi)
        throw std::invalid_argument("fit_fringe: phase span must cover at least 1.5*pi");

    const std::vector<double> th(phases.begin(), phases.end());
    std::vector<double> ns(counts.size());
    for (std::size_t k = 0; k < counts.size(); ++k) ns[k] = static_cast<double>(counts[k]);

    // Poisson weighting by the model variance; the weight carries a Jacobian
    // contribution of its own.
    constexpr double kFloor = 1e-9;
    const ResidualFn res = [&](const Eigen::VectorXd& p, Eigen::VectorXd& r) {
        r.resize(static_cast<Eigen::Index>(th.size()));
        for (std::size_t k = 0; k < th.size(); ++k) {
            const double m = std::max(p(0) * (1.0 + p(1) * std::cos(th[k] - p(2))), kFloor);
            r(static_cast<Eigen::Index>(k)) = (ns[k] - m) / std::sqrt(m);
        }
    };
    const JacobianFn jac = [&](const Eigen::VectorXd& p, Eigen::MatrixXd& j) {
        j.resize(static_cast<Eigen::Index>(th.size()), 3);
        for (std::size_t k = 0; k < th.size(); ++k) {
            const double cosw = std::cos(th[k] - p(2));
            const double sinw = std::sin(th[k] - p(2));
            const double m = std::max(p(0) * (1.0 + p(1) * cosw), kFloor);
            const double sq = std::sqrt(m);
            const double common = -(1.0 / sq) * (1.0 + (ns[k] - m) / (2.0 * m));
            j(static_cast<Eigen::Index>(k), 0) = common * (1.0 + p(1) * cosw);
            j(static_cast<Eigen::Index>(k), 1) = common * p(0) * cosw;
            j(static_cast<Eigen::Index>(k), 2) = common * p(0) * p(1) * sinw;
        }
    };

    // Fourier-mode initializer (phases need not be uniform; good enough as a seed).
    double mean = 0.0, a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < th.size(); ++k) {
        mean += ns[k];
        a += ns[k] * std::cos(th[k]);
        b += ns[k] * std::sin(th[k]);
    }
    const double n = static_cast<double>(th.size());
    mean /= n;
    a *= 2.0 / n;
    b *= 2.0 / n;
    const double v0 = mean > 0.0 ? std::clamp(std::hypot(a, b) / mean, 1e-3, 0.95) : 0.1;
    Eigen::VectorXd x0(3);
    x0 << std::max(mean, kFloor), v0, std::atan2(b, a);

    FitResult fr = lm_minimize(res, jac, x0);
    fr.model = FitModel::SinusoidFringe;
    fr.names = {"n0", "visibility", "theta0"};
    // Canonicalize: visibility >= 0, theta0 in (-pi, pi].
    if (fr.values(1) < 0.0) {
        fr.values(1) = -fr.values(1);
        fr.values(2) += kPi;
    }
    fr.values(2) = std::remainder(fr.values(2), 2.0 * kPi);
    if (fr.values(1) > 1.0 + 3.0 * fr.sigmas(1)) fr.identifiability_warning = true;
    return fr;
}

} // namespace spincoh
