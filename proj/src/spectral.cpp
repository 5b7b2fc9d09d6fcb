#include "spincoh/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <Eigen/Eigenvalues>

namespace spincoh {

namespace {

// Slots of the closed {rho22, rho23, rho32, rho33} subsystem in vec(rho).
constexpr int kSub[4] = {4, 5, 7, 8};

Eigen::Matrix4cd restrict_to_subspace(const Matrix9c& m) {
    Eigen::Matrix4cd a;
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c) a(r, c) = m(kSub[r], kSub[c]);
    return a;
}

struct Eigensystem {
    Eigen::Vector<Complex, 9> values;
    Matrix9c vectors;
};

Eigensystem eigensystem(const SystemParams& p) {
    const Liouvillian l = build_liouvillian(p);
    Eigen::ComplexEigenSolver<Matrix9c> es(l.m, true);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("decay_rates: eigen-solver failed to converge");
    return {es.eigenvalues(), es.eigenvectors()};
}

// Index of the slowest nonzero eigenvalue with |Im| < gamma/10 (the
// non-oscillatory pumping branch). Returns -1 if none qualifies.
int slow_root_index(const Eigen::Vector<Complex, 9>& ev, double gamma) {
    int best = -1;
    for (int k = 0; k < 9; ++k) {
        if (std::abs(ev(k)) < 1e-9 * std::max(1.0, gamma)) continue;
        if (std::abs(ev(k).imag()) >= 0.1 * gamma) continue;
        if (best < 0 || ev(k).real() > ev(best).real()) best = k;
    }
    return best;
}

} // namespace

double gamma_sp_closed_form(double omega, double gamma) {
    if (!(gamma > 0.0)) throw std::invalid_argument("gamma_sp_closed_form: gamma must be > 0");
    return 0.5 * omega * omega * gamma / (gamma * gamma + 2.0 * omega * omega);
}

double gamma_sp_pumping(const SystemParams& p) {
    p.validate();
    // No drive or no decay path out of the subspace: nothing gets pumped.
    if (p.omega <= 0.0 || p.gamma31 <= 0.0) return 0.0;
    const Liouvillian l = build_liouvillian(p);
    const Eigen::Matrix4cd a = restrict_to_subspace(l.m);
    Eigen::Vector4cd rhs = Eigen::Vector4cd::Zero();
    rhs(0) = -1.0;  // start from rho22 = 1
    const Eigen::Vector4cd y = a.partialPivLu().solve(rhs);
    const double mean_time = (y(0) + y(3)).real();  // integrated rho22 + rho33
    if (!(mean_time > 0.0))
        throw std::runtime_error("gamma_sp_pumping: non-positive integrated survival");
    return 1.0 / mean_time;
}

double power_to_rabi(double p_over_psat, double gamma) {
    if (p_over_psat < 0.0)
        throw std::invalid_argument("power_to_rabi: P/P_sat must be >= 0");
    return gamma * std::sqrt(0.5 * p_over_psat);
}

double rabi_to_power(double omega, double gamma) {
    return 2.0 * omega * omega / (gamma * gamma);
}

std::array<Complex, 9> closed_form_roots(const SystemParams& p) {
    const double xi = p.xi();
    const Complex disc =
        std::sqrt(Complex(xi * xi / 16.0 - p.omega * p.omega / 4.0, 0.0));
    std::array<Complex, 9> s;
    s[0] = 0.0;
    s[1] = -gamma_sp_pumping(p);
    s[2] = Complex(-0.625 * p.gamma, p.omega);
    s[3] = Complex(-0.625 * p.gamma, -p.omega);
    s[4] = -0.5 * xi;
    s[5] = -xi / 4.0 + disc;
    s[6] = s[5];
    s[7] = -xi / 4.0 - disc;
    s[8] = s[7];
    return s;
}

RateSpectrum decay_rates(const SystemParams& p) {
    p.validate();
    const Eigensystem es = eigensystem(p);
    const std::array<Complex, 9> targets = closed_form_roots(p);

    // Globally-greedy nearest-distance assignment of eigenvalues to labels.
    std::array<int, 9> pick;
    pick.fill(-1);
    std::array<bool, 9> used{};
    for (int round = 0; round < 9; ++round) {
        double best = std::numeric_limits<double>::infinity();
        int bl = -1, bk = -1;
        for (int lab = 0; lab < 9; ++lab) {
            if (pick[lab] >= 0) continue;
            for (int k = 0; k < 9; ++k) {
                if (used[k]) continue;
                const double d = std::abs(es.values(k) - targets[lab]);
                if (d < best - 1e-15 ||
                    (d < best + 1e-15 && bk >= 0 &&
                     es.values(k).real() < es.values(bk).real())) {
                    best = d;
                    bl = lab;
                    bk = k;
                }
            }
        }
        pick[bl] = bk;
        used[bk] = true;
    }

    RateSpectrum spec;
    for (int lab = 0; lab < 9; ++lab) spec.roots[lab] = es.values(pick[lab]);
    // Canonical ordering inside conjugate pairs: positive imaginary part first.
    auto order_pair = [&spec](int a, int b) {
        if (spec.roots[a].imag() < spec.roots[b].imag()) std::swap(spec.roots[a], spec.roots[b]);
    };
    order_pair(2, 3);
    order_pair(5, 6);
    order_pair(7, 8);

    spec.gamma_sp = gamma_sp_pumping(p);
    const int slow = slow_root_index(es.values, p.gamma);
    spec.slow_root_rate = slow >= 0 ? -es.values(slow).real() : 0.0;
    return spec;
}

DensityMatrix quasi_steady_state(const SystemParams& p) {
    p.validate();
    if (p.omega <= 0.0)
        throw std::domain_error("quasi_steady_state: requires omega > 0");

    // The {rho22, rho23, rho32, rho33} subsystem is closed; its slowest mode is
    // the quasi-steady state. Working on the restricted 4x4 keeps the slow
    // eigenvector clean of the nearly-degenerate ground-coherence doublet.
    const Liouvillian l = build_liouvillian(p);
    const Eigen::Matrix4cd a = restrict_to_subspace(l.m);
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(a, true);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("quasi_steady_state: eigen-solver failed");
    int slow = 0;
    for (int k = 1; k < 4; ++k)
        if (es.eigenvalues()(k).real() > es.eigenvalues()(slow).real()) slow = k;

    const Eigen::Vector4cd v = es.eigenvectors().col(slow);
    Matrix3c rho = Matrix3c::Zero();
    rho(1, 1) = v(0);
    rho(1, 2) = v(1);
    rho(2, 1) = v(2);
    rho(2, 2) = v(3);
    const Complex tr = rho(1, 1) + rho(2, 2);
    if (std::abs(tr) < 1e-14)
        throw std::runtime_error("quasi_steady_state: degenerate slow eigenvector");
    rho /= tr;
    rho = 0.5 * (rho + rho.adjoint()).eval();  // remove residual numerical skew
    return {rho};
}

Complex quasi_steady_ratio(const SystemParams& p) {
    if (p.omega <= 0.0)
        throw std::domain_error("quasi_steady_ratio: undefined at omega = 0");
    const DensityMatrix qss = quasi_steady_state(p);
    return qss.rho(2, 1) / qss.rho(2, 2);
}

Complex refine_root(const Liouvillian& l, Complex seed) {
    const auto det_at = [&l](Complex s) -> Complex {
        Matrix9c a = -l.m;
        for (int i = 0; i < 9; ++i) a(i, i) += s;
        return a.partialPivLu().determinant();
    };
    Complex s = seed;
    const double scale = std::max(1.0, std::abs(seed));
    for (int it = 0; it < 60; ++it) {
        const double h = 1e-7 * scale;
        const Complex f = det_at(s);
        const Complex fp = (det_at(s + h) - det_at(s - h)) / (2.0 * h);
        if (std::abs(fp) == 0.0) break;
        const Complex step = f / fp;
        s -= step;
        if (std::abs(step) < 1e-13 * scale) break;
    }
    return s;
}

} // namespace spincoh
