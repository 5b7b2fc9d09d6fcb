// system_params.hpp — Physical parameters of the driven three-level Lambda system

#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "spincoh/units.hpp"

namespace spincoh {

// Basis order: |1> = spin-down ground state, |2> = spin-up ground state,
// |3> = trion. The laser drives 2<->3 resonantly; |3> decays into both
// ground states with branching gamma31 + gamma32 = gamma.
struct SystemParams {
    double omega = 0.0;    // Rabi frequency, rad/ns
    double gamma = 1.0;    // total decay of |3>, 1/ns
    double gamma31 = 0.5;  // branching |3> -> |1>, 1/ns
    double gamma32 = 0.5;  // branching |3> -> |2>, 1/ns
    double gamma3 = 0.0;   // pure dephasing of |3>, 1/ns
    double omega12 = 0.0;  // ground-state Zeeman splitting, rad/ns
    double t2star = 1.0;   // inhomogeneous spin dephasing time, ns

    double xi() const { return gamma + gamma3; }

    void validate() const {
        std::string err;
        if (!(omega >= 0.0)) err += "omega must be >= 0; ";
        if (!(gamma > 0.0)) err += "gamma must be > 0; ";
        if (gamma31 < 0.0 || gamma32 < 0.0) err += "branching rates must be >= 0; ";
        else if (std::abs(gamma31 + gamma32 - gamma) > 1e-12 * gamma)
            err += "branching must satisfy gamma31 + gamma32 = gamma; ";
        if (gamma3 < 0.0) err += "gamma3 must be >= 0; ";
        if (!(t2star > 0.0)) err += "t2star must be > 0; ";
        if (!err.empty()) throw std::invalid_argument("SystemParams: " + err);
    }

    // Equal branching gamma/2 into each ground state.
    static SystemParams make(double omega, double gamma, double gamma3 = 0.0,
                             double omega12 = 0.0, double t2star = 1.0) {
        SystemParams p;
        p.omega = omega;
        p.gamma = gamma;
        p.gamma31 = 0.5 * gamma;
        p.gamma32 = 0.5 * gamma;
        p.gamma3 = gamma3;
        p.omega12 = omega12;
        p.t2star = t2star;
        p.validate();
        return p;
    }

    static SystemParams from_lifetimes(double omega, double t1_ns, double t2_ns,
                                       double omega12 = 0.0, double t2star = 1.0) {
        const DecayRates r = lifetimes_to_rates(t1_ns, t2_ns);
        return make(omega, r.gamma, r.gamma3, omega12, t2star);
    }
};

} // namespace spincoh
