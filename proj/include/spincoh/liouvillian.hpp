// liouvillian.hpp — Generator of the vectorized Bloch equations of the driven Lambda system

#pragma once

#include "spincoh/density_matrix.hpp"
#include "spincoh/system_params.hpp"

namespace spincoh {

// d/dt vec(rho) = m * vec(rho) in the row-major slot convention of
// density_matrix.hpp. The drive is resonant on 2<->3 in the rotating frame;
// the ground-state splitting omega12 deliberately does not appear here — it
// enters the analysis only as the Larmor phase factor averaged in the Raman
// visibility.
struct Liouvillian {
    Matrix9c m;
    SystemParams params;
};

Liouvillian build_liouvillian(const SystemParams& p);

// Superoperator building blocks, row-major convention: vec(A X B) = (A ⊗ B^T) vec(X).
Matrix9c left_multiplier(const Matrix3c& a);   // X -> A X
Matrix9c right_multiplier(const Matrix3c& b);  // X -> X B
Matrix9c lindblad_dissipator(const Matrix3c& l, double rate);

} // namespace spincoh
