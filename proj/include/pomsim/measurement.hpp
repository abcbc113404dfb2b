#pragma once

#include <cstdint>
#include <utility>

#include "pomsim/dynamics.hpp"
#include "pomsim/gaussian_state.hpp"
#include "pomsim/params.hpp"

namespace pomsim {

// How the homodyne outcome entering the conditional mean update is chosen.
// Covariances are outcome-independent either way.
struct OutcomePolicy {
    enum class Kind { fixed, sampled, marginalize };
    Kind kind = Kind::marginalize;
    double value = 0.0;     // used by fixed
    std::uint64_t seed = 0; // used by sampled

    static OutcomePolicy fixed(double v) { return {Kind::fixed, v, 0}; }
    static OutcomePolicy sampled(std::uint64_t s) { return {Kind::sampled, 0.0, s}; }
    static OutcomePolicy marginalize() { return {Kind::marginalize, 0.0, 0}; }

    bool operator==(const OutcomePolicy&) const = default;
};

// One pulsed position measurement: arrival time and per-mode strengths.
struct PulseEvent {
    double t = 0.0;
    double chi1 = 0.0;
    double chi2 = 0.0;
    OutcomePolicy policy = OutcomePolicy::marginalize();

    double kick() const;      // sqrt(chi1^2 + chi2^2), strength on the measured quadrature
};

// Record of one homodyne readout. inferred_position rescales the optical
// outcome by the kick so it estimates the measured mechanical quadrature.
struct MeasurementRecord {
    double t = 0.0;
    double outcome = 0.0;
    double inferred_position = 0.0;
};

// Scaling of the per-pulse measurement strength with detection efficiency,
// pulse photon number, optomechanical rate and cavity linewidth. The overall
// dimensionless prefactor is device-dependent and left as an argument.
double measurement_strength(double eta, double n_p, double g, double kappa,
                            double prefactor = 1.0);

// Symplectic kick of one pulse on a 3-mode state already expressed in the
// measured basis (measured mechanical quadrature first, optics last): the
// optical phase picks up kick*X_measured and the measured mode's momentum
// picks up the backaction kick*X_L.
GaussianState pulsed_interaction(const GaussianState& state, const PulseEvent& pulse);

// Ideal phase-locked homodyne detection of P_L: Schur-complement update of
// the mechanical block conditioned on the readout row, then removal of the
// optical mode. Conditioning is skipped when the readout variance is below
// 1e-14 (no information). Means shift by the regression of the outcome.
std::pair<GaussianState, MeasurementRecord>
homodyne_condition(const GaussianState& state, const PulseEvent& pulse);

// Composite position measurement at time t on a 2-mode canonical state:
// rotate to the measured basis at t, attach optical vacuum, apply the pulse
// kick, condition on the homodyne outcome, rotate back to canonical.
std::pair<GaussianState, MeasurementRecord>
measure_position(const GaussianState& state, const SystemParams& params,
                 const PulseEvent& pulse);

}  // namespace pomsim
