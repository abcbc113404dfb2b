#include "pomsim/measurement.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pomsim {

namespace {

// Deterministic standard-normal draw: Box-Muller on two 53-bit uniforms.
// Hand-rolled (rather than std::normal_distribution) because the standard
// leaves that distribution's algorithm unspecified, and sweep outputs must
// be bit-reproducible for a given seed.
double standard_normal(std::mt19937_64& rng) {
    double u1 = 0.0;
    while (u1 <= 0.0) u1 = (rng() >> 11) * 0x1.0p-53;
    const double u2 = (rng() >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace

double PulseEvent::kick() const { return std::sqrt(chi1 * chi1 + chi2 * chi2); }

double measurement_strength(double eta, double n_p, double g, double kappa,
                            double prefactor) {
    if (eta < 0.0 || eta > 1.0)
        throw std::invalid_argument("measurement_strength: efficiency must be in [0,1]");
    if (n_p < 0.0 || g < 0.0)
        throw std::invalid_argument("measurement_strength: photon number and rate must be nonnegative");
    if (kappa <= 0.0)
        throw std::invalid_argument("measurement_strength: cavity linewidth must be positive");
    return prefactor * eta * std::sqrt(n_p) * g / kappa;
}

GaussianState pulsed_interaction(const GaussianState& state, const PulseEvent& pulse) {
    if (state.n_modes != 3)
        throw std::invalid_argument("pulsed_interaction: expects a 3-mode state");
    const double s = pulse.kick();
    if (s == 0.0) return state;

    // Quadrature order here: (X_meas, P_meas, Y, Q, X_L, P_L). The pulse
    // writes the measured position onto the optical phase and the optical
    // amplitude (shot noise) onto the measured momentum.
    Eigen::Matrix<double, 6, 6> map = Eigen::Matrix<double, 6, 6>::Identity();
    map(1, 4) += s;  // backaction: P_meas += s * X_L
    map(5, 0) += s;  // signal:     P_L   += s * X_meas

    GaussianState out;
    out.n_modes = 3;
    out.mean = map * state.mean;
    out.cov = map * state.cov * map.transpose();
    return out;
}

std::pair<GaussianState, MeasurementRecord>
homodyne_condition(const GaussianState& state, const PulseEvent& pulse) {
    if (state.n_modes != 3)
        throw std::invalid_argument("homodyne_condition: expects a 3-mode state");

    const double var_pl = state.cov(5, 5);
    if (var_pl < 0.0)
        throw std::invalid_argument("homodyne_condition: negative readout variance");
    const double mean_pl = state.mean(5);

    double outcome = mean_pl;
    switch (pulse.policy.kind) {
        case OutcomePolicy::Kind::fixed:
            outcome = pulse.policy.value;
            break;
        case OutcomePolicy::Kind::sampled: {
            std::mt19937_64 rng(pulse.policy.seed);
            outcome = mean_pl + std::sqrt(std::max(var_pl, 0.0)) * standard_normal(rng);
            break;
        }
        case OutcomePolicy::Kind::marginalize:
            break;  // outcome at the mean leaves the mean unchanged
    }

    GaussianState mech;
    mech.n_modes = 2;
    // Below this variance the record carries no information; conditioning
    // would divide by ~0, so the mechanical state is passed through.
    if (var_pl < 1e-14) {
        mech.mean = state.mean.head(4);
        mech.cov = state.cov.topLeftCorner(4, 4);
    } else {
        const Eigen::Vector4d cross = state.cov.block<4, 1>(0, 5);
        mech.cov = state.cov.topLeftCorner(4, 4) - (cross * cross.transpose()) / var_pl;
        mech.mean = state.mean.head(4) + cross * ((outcome - mean_pl) / var_pl);
    }

    MeasurementRecord record;
    record.t = pulse.t;
    record.outcome = outcome;
    const double s = pulse.kick();
    record.inferred_position = s > 0.0 ? outcome / s : 0.0;
    return {mech, record};
}

std::pair<GaussianState, MeasurementRecord>
measure_position(const GaussianState& state, const SystemParams& params,
                 const PulseEvent& pulse) {
    if (state.n_modes != 2)
        throw std::invalid_argument("measure_position: expects a 2-mode state");
    if (pulse.chi1 == 0.0 && pulse.chi2 == 0.0) {
        MeasurementRecord record;
        record.t = pulse.t;
        return {state, record};
    }

    // The measured-basis map depends on the pulse couplings, not on whatever
    // strengths are stored in params.
    SystemParams p = params;
    p.chi1 = pulse.chi1;
    p.chi2 = pulse.chi2;
    const Eigen::Matrix4d f = measured_basis_map(p, pulse.t);

    GaussianState rotated;
    rotated.n_modes = 2;
    rotated.mean = f * state.mean;
    rotated.cov = f * state.cov * f.transpose();

    auto [conditioned, record] =
        homodyne_condition(pulsed_interaction(attach_vacuum_optical_mode(rotated), pulse), pulse);

    GaussianState out;
    out.n_modes = 2;
    out.mean = f.transpose() * conditioned.mean;
    out.cov = f.transpose() * conditioned.cov * f;
    return {out, record};
}

}  // namespace pomsim
