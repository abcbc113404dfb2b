#pragma once

#include <cmath>
#include <stdexcept>

namespace pomsim {

// Physical parameters of the two mechanical modes and the pulsed readout.
// Dimensionless convention: omega1 = 1 sets the time unit, quadratures are in
// zero-point units (vacuum variance 1/2), measurement strengths chi are the
// per-mode signal-to-shot-noise ratios of a single pulse.
struct SystemParams {
    double omega1 = 1.0;
    double omega2 = 3.0;
    double q1 = 1e6;            // quality factor of mode 1
    double q2 = 1e6;            // quality factor of mode 2
    double n_th1 = 1e4;         // thermal phonon occupation of mode 1
    double n_th2 = 1e4 / 3.0;   // thermal phonon occupation of mode 2
    double chi1 = 2.0;          // measurement strength coupling to mode 1
    double chi2 = 2.0;          // measurement strength coupling to mode 2

    // Average and relative angular frequencies of the mode pair.
    double omega_avg() const { return 0.5 * (omega1 + omega2); }
    double omega_rel() const { return 0.5 * (omega1 - omega2); }

    // Energy decay rates.
    double gamma1() const { return omega1 / q1; }
    double gamma2() const { return omega2 / q2; }

    // Total occupations including zero-point motion; these are the quadrature
    // variances of the thermal state of each mode.
    double n1() const { return n_th1 + 0.5; }
    double n2() const { return n_th2 + 0.5; }

    // Per-pulse effective strength for a mismatched pair, normalized so that
    // chi_eff == chi1 == chi2 at equal couplings.
    double chi_eff() const { return std::sqrt(0.5 * (chi1 * chi1 + chi2 * chi2)); }

    // Strength of the pulse kick on the normalized measured quadrature: the
    // optical phase picks up chi1*X1 + chi2*X2, whose normalized mode carries
    // sqrt(chi1^2 + chi2^2).
    double kick() const { return std::sqrt(chi1 * chi1 + chi2 * chi2); }

    bool operator==(const SystemParams&) const = default;

    void validate() const {
        if (!(omega1 > 0.0) || !(omega2 > 0.0))
            throw std::invalid_argument("SystemParams: frequencies must be positive");
        if (!(q1 > 0.0) || !(q2 > 0.0))
            throw std::invalid_argument("SystemParams: quality factors must be positive");
        if (n_th1 < 0.0 || n_th2 < 0.0)
            throw std::invalid_argument("SystemParams: thermal occupations must be nonnegative");
        if (chi1 < 0.0 || chi2 < 0.0)
            throw std::invalid_argument("SystemParams: measurement strengths must be nonnegative");
    }
};

}  // namespace pomsim
