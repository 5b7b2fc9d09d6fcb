#include "spincoh/visibility.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

#include "spincoh/spectral.hpp"

namespace spincoh {

OverhauserDistribution OverhauserDistribution::from_params(const SystemParams& p, int order) {
    OverhauserDistribution d;
    d.mean = p.omega12;
    d.sigma = std::sqrt(2.0) / p.t2star;
    d.order = order;
    return d;
}

GaussHermite gauss_hermite(int order) {
    if (order < 1) throw std::invalid_argument("gauss_hermite: order must be >= 1");
    // Golub–Welsch on the Jacobi matrix of the Hermite recurrence: eigenvalues
    // are the nodes, squared first eigenvector components the normalized weights.
    Eigen::MatrixXd j = Eigen::MatrixXd::Zero(order, order);
    for (int i = 1; i < order; ++i) {
        const double b = std::sqrt(0.5 * i);
        j(i - 1, i) = b;
        j(i, i - 1) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(j);
    GaussHermite gh;
    gh.nodes.resize(order);
    gh.weights.resize(order);
    for (int i = 0; i < order; ++i) {
        gh.nodes[i] = es.eigenvalues()(i);
        const double v0 = es.eigenvectors()(0, i);
        gh.weights[i] = v0 * v0;
    }
    return gh;
}

namespace {

struct ChannelAmplitudes {
    std::vector<Complex> g1;
    bool warning = false;
};

ChannelAmplitudes correlator(Channel ch, const SystemParams& p,
                             std::span<const double> tau) {
    const CorrelationTrace t = g1(ch, p, tau);
    return {t.g1, t.validity_warning};
}

// Gaussian average of g1 * exp(i * delta_omega * tau) at one delay. The
// correlator is independent of the Larmor detuning (the generator carries no
// splitting), so it enters as a common factor of the quadrature sum.
Complex overhauser_average(Complex g1_value, double tau, double sigma,
                           const GaussHermite& gh) {
    Complex s = 0.0;
    const double scale = std::sqrt(2.0) * sigma;
    for (std::size_t i = 0; i < gh.nodes.size(); ++i) {
        const double dw = scale * gh.nodes[i];
        s += gh.weights[i] * std::polar(1.0, dw * tau);
    }
    return s * g1_value;
}

} // namespace

VisibilityCurve v_blue(const SystemParams& p, std::span<const double> tau) {
    const double gsp = gamma_sp_pumping(p);
    const ChannelAmplitudes amp = correlator(Channel::Rayleigh, p, tau);

    VisibilityCurve c;
    c.channel = VisChannel::Blue;
    c.params = p;
    c.validity_warning = amp.warning;
    c.tau.assign(tau.begin(), tau.end());
    c.v.resize(tau.size());
    c.valid.assign(tau.size(), 1);
    for (std::size_t k = 0; k < tau.size(); ++k) {
        double v = std::exp(0.5 * gsp * tau[k]) * std::abs(amp.g1[k]);
        if (v > 1.0 + 1e-6) {
            // compensation inconsistent with the correlator decay
            v = 1.0;
            c.valid[k] = 0;
        }
        c.v[k] = v;
    }
    return c;
}

VisibilityCurve v_diag1(const SystemParams& p, std::span<const double> tau, int quad_order) {
    const double gsp = gamma_sp_pumping(p);
    const double sigma = std::sqrt(2.0) / p.t2star;
    const ChannelAmplitudes amp = correlator(Channel::Raman, p, tau);

    // Node spacing must resolve the Larmor phase oscillation: the integrand
    // oscillates as exp(i b u) with b = sqrt(2) sigma tau, needing ~b^2/2
    // nodes. The requested order bounds the auto-raise; grids deeper than
    // tau/T2* ~ 2 sqrt(2 quad_order) fail the doubling check and need a
    // larger quad_order (the envelope there is < 1e-28 anyway).
    const double b_max = tau.empty() ? 0.0 : std::sqrt(2.0) * sigma * tau.back();
    const int needed = static_cast<int>(0.5 * b_max * b_max) + 32;
    const int order = std::clamp(needed, quad_order, 4 * quad_order);
    const GaussHermite gh = gauss_hermite(order);
    const GaussHermite gh2 = gauss_hermite(2 * order);

    VisibilityCurve c;
    c.channel = VisChannel::Diag1;
    c.params = p;
    c.validity_warning = amp.warning;
    c.tau.assign(tau.begin(), tau.end());
    c.v.resize(tau.size());
    c.valid.assign(tau.size(), 1);
    for (std::size_t k = 0; k < tau.size(); ++k) {
        const Complex avg = overhauser_average(amp.g1[k], tau[k], sigma, gh);
        const Complex avg2 = overhauser_average(amp.g1[k], tau[k], sigma, gh2);
        if (std::abs(avg - avg2) > 1e-8)
            throw std::runtime_error("v_diag1: quadrature not converged at tau = " +
                                     std::to_string(tau[k]));
        double v = std::exp(0.5 * gsp * tau[k]) * std::abs(avg2);
        if (v > 1.0 + 1e-6) {
            v = 1.0;
            c.valid[k] = 0;
        }
        c.v[k] = v;
    }
    return c;
}

VisibilityCurve visibility_ratio(const VisibilityCurve& blue, const VisibilityCurve& diag1) {
    if (blue.tau != diag1.tau)
        throw std::invalid_argument("visibility_ratio: curves must share the tau grid");
    VisibilityCurve c;
    c.channel = VisChannel::Ratio;
    c.params = blue.params;
    c.validity_warning = blue.validity_warning || diag1.validity_warning;
    c.tau = blue.tau;
    c.v.resize(blue.tau.size());
    c.valid.resize(blue.tau.size());
    for (std::size_t k = 0; k < blue.tau.size(); ++k) {
        const bool ok = blue.valid[k] && diag1.valid[k] && blue.v[k] >= 1e-6;
        c.valid[k] = ok ? 1 : 0;
        c.v[k] = ok ? diag1.v[k] / blue.v[k] : 0.0;
    }
    return c;
}

VisibilityCurve visibility_ratio(const SystemParams& p, std::span<const double> tau,
                                 int quad_order) {
    return visibility_ratio(v_blue(p, tau), v_diag1(p, tau, quad_order));
}

VisibilityCurve apply_laser_normalization(VisibilityCurve c, double laser_visibility) {
    if (!(laser_visibility > 0.0 && laser_visibility <= 1.0))
        throw std::invalid_argument("apply_laser_normalization: visibility must be in (0, 1]");
    for (double& v : c.v) v /= laser_visibility;
    return c;
}

} // namespace spincoh
