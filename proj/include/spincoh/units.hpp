// units.hpp — Unit conventions and conversions (rates in 1/ns, angular frequencies in rad/ns)

#pragma once

#include <cmath>
#include <stdexcept>

namespace spincoh {

inline constexpr double kPi = 3.14159265358979323846;

// 1 GHz of splitting = 2*pi rad/ns of angular frequency.
inline double ghz_to_rad_ns(double f_ghz) { return 2.0 * kPi * f_ghz; }
inline double rad_ns_to_ghz(double w_rad_ns) { return w_rad_ns / (2.0 * kPi); }

struct DecayRates {
    double gamma;   // total excited-state decay, 1/ns
    double gamma3;  // pure dephasing of the excited state, 1/ns
};

// Convert (T1, T2) to (Gamma, gamma3) with gamma3 = 1/T2 - 1/(2 T1).
// Requires 0 < T2 <= 2*T1.
inline DecayRates lifetimes_to_rates(double t1_ns, double t2_ns) {
    if (t1_ns <= 0.0 || t2_ns <= 0.0)
        throw std::invalid_argument("lifetimes_to_rates: T1 and T2 must be positive");
    const double gamma = 1.0 / t1_ns;
    double gamma3 = 1.0 / t2_ns - 0.5 / t1_ns;
    if (gamma3 < -1e-12 * gamma)
        throw std::invalid_argument("lifetimes_to_rates: T2 > 2*T1 is unphysical");
    if (gamma3 < 0.0) gamma3 = 0.0;
    return {gamma, gamma3};
}

} // namespace spincoh
