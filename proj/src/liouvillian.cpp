#include "spincoh/liouvillian.hpp"

namespace spincoh {

namespace {

Matrix9c kron3(const Matrix3c& a, const Matrix3c& b) {
    Matrix9c k;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) k.block<3, 3>(3 * i, 3 * j) = a(i, j) * b;
    return k;
}

Matrix3c ketbra(int i, int j) {
    Matrix3c m = Matrix3c::Zero();
    m(i, j) = 1.0;
    return m;
}

} // namespace

Matrix9c left_multiplier(const Matrix3c& a) { return kron3(a, Matrix3c::Identity()); }

Matrix9c right_multiplier(const Matrix3c& b) {
    return kron3(Matrix3c::Identity(), b.transpose());
}

Matrix9c lindblad_dissipator(const Matrix3c& l, double rate) {
    const Matrix3c ll = l.adjoint() * l;
    return rate * (kron3(l, l.conjugate()) -
                   0.5 * (left_multiplier(ll) + right_multiplier(ll)));
}

Liouvillian build_liouvillian(const SystemParams& p) {
    p.validate();
    const Complex img(0.0, 1.0);
    const Matrix3c s13 = ketbra(0, 2);  // |1><3|
    const Matrix3c s23 = ketbra(1, 2);  // |2><3|
    const Matrix3c s32 = ketbra(2, 1);  // |3><2|
    const Matrix3c s33 = ketbra(2, 2);

    // H = -(Omega/2)(sigma_32 + sigma_23), resonant drive in the rotating frame.
    const Matrix3c h = -0.5 * p.omega * (s32 + s23);

    Matrix9c m = -img * (left_multiplier(h) - right_multiplier(h));
    m += lindblad_dissipator(s13, p.gamma31);
    m += lindblad_dissipator(s23, p.gamma32);
    m += lindblad_dissipator(s33, p.gamma3);
    return {m, p};
}

} // namespace spincoh
