// density_matrix.hpp — 3x3 density matrix and its length-9 vectorized form

#pragma once

#include <complex>
#include <stdexcept>

#include <Eigen/Dense>

namespace spincoh {

using Complex = std::complex<double>;
using Matrix3c = Eigen::Matrix3cd;
using Matrix9c = Eigen::Matrix<Complex, 9, 9>;
using Vector9c = Eigen::Matrix<Complex, 9, 1>;

// Vectorization convention used throughout: row-major, slot(i,j) = 3*i + j,
// i.e. vec(rho) = [rho11, rho12, rho13, rho21, rho22, rho23, rho31, rho32, rho33].
inline int vec_slot(int i, int j) { return 3 * i + j; }

inline Vector9c vectorize(const Matrix3c& m) {
    Vector9c v;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) v(vec_slot(i, j)) = m(i, j);
    return v;
}

inline Matrix3c unvectorize(const Vector9c& v) {
    Matrix3c m;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) m(i, j) = v(vec_slot(i, j));
    return m;
}

struct DensityMatrix {
    Matrix3c rho = Matrix3c::Zero();

    double trace_defect() const { return std::abs(rho.trace() - 1.0); }

    double hermiticity_defect() const {
        return (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    }

    // Smallest eigenvalue of the Hermitian part.
    double min_eigenvalue() const {
        const Matrix3c h = 0.5 * (rho + rho.adjoint());
        Eigen::SelfAdjointEigenSolver<Matrix3c> es(h);
        return es.eigenvalues().minCoeff();
    }

    bool is_physical(double herm_tol = 1e-10, double trace_tol = 1e-10,
                     double eig_floor = -1e-8) const {
        return hermiticity_defect() < herm_tol && trace_defect() < trace_tol &&
               min_eigenvalue() > eig_floor;
    }

    Vector9c vectorized() const { return vectorize(rho); }

    // |level><level| with level in {1, 2, 3}.
    static DensityMatrix pure(int level) {
        if (level < 1 || level > 3)
            throw std::invalid_argument("DensityMatrix::pure: level must be 1, 2 or 3");
        DensityMatrix d;
        d.rho(level - 1, level - 1) = 1.0;
        return d;
    }

    static DensityMatrix from_vector(const Vector9c& v) { return {unvectorize(v)}; }
};

} // namespace spincoh
