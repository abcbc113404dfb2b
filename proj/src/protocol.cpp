#include "pomsim/protocol.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "pomsim/dynamics.hpp"

namespace pomsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Variance of the position quadrature a pulse would read at absolute time t,
// after the state has decohered for the final stretch `delay`.
double realigned_position_variance(const GaussianState& state, const SystemParams& params,
                                   double absolute_t, double delay) {
    const GaussianState relaxed = decohere(state, delay, params);
    const Eigen::Matrix4d f = measured_basis_map(params, absolute_t);
    return (f * relaxed.cov * f.transpose())(0, 0);
}

}  // namespace

EntangleSchedule make_entangle_schedule(const SystemParams& params, int k, int l) {
    if (k < 0 || l < 0)
        throw std::invalid_argument("make_entangle_schedule: k and l must be nonnegative");
    EntangleSchedule schedule;
    schedule.k = k;
    schedule.l = l;
    schedule.tau = (2 * k + 1) * kPi / (2.0 * params.omega1);
    return schedule;
}

double ideal_ratio_for_doublet(int k, int l) {
    return static_cast<double>(2 * k + 3 + 4 * l) / static_cast<double>(2 * k + 1);
}

VerifySchedule default_verify_schedule(const SystemParams& params) {
    VerifySchedule schedule;
    schedule.d_plus = kPi / (2.0 * params.omega1);
    schedule.d_minus = kPi / params.omega1;
    schedule.d_cross = kPi / (4.0 * params.omega1);
    return schedule;
}

GenerationCriteria generation_criteria(const SystemParams& params) {
    const double chi = params.chi_eff();
    const double chi2 = chi * chi;
    // Decoherence load over a half period of the slow mode; equals 2*pi*n/Q
    // for equal quality factors.
    const double load = kPi * params.n1() * (1.0 / params.q1 + 1.0 / params.q2);

    GenerationCriteria c;
    c.chi_margin = chi - 1.0 / std::numbers::sqrt2;
    c.chi_above_threshold = c.chi_margin > 0.0;
    // Written multiplied through by chi^2 so chi = 0 needs no special case:
    // (4 chi^4 - 1)/chi^2 > load  <=>  4 chi^4 - 1 - load*chi^2 > 0.
    c.q_margin = 4.0 * chi2 * chi2 - 1.0 - load * chi2;
    c.q_above_minimum = c.q_margin > 0.0;
    c.decoherence_margin = 1.0 - load;
    c.decoherence_small = c.decoherence_margin > 0.0;
    return c;
}

std::pair<GaussianState, ProtocolReport>
run_entangle(const SystemParams& params, const EntangleSchedule& schedule) {
    params.validate();
    if (!(schedule.tau >= 0.0) || !std::isfinite(schedule.tau))
        throw std::invalid_argument("run_entangle: delay between pulses must be finite and nonnegative");

    GaussianState state = thermal_state(params.n1(), params.n2());

    PulseEvent first{0.0, params.chi1, params.chi2, OutcomePolicy::marginalize()};
    state = measure_position(state, params, first).first;
    state = decohere(state, schedule.tau, params);
    PulseEvent second{schedule.tau, params.chi1, params.chi2, OutcomePolicy::marginalize()};
    state = measure_position(state, params, second).first;

    ProtocolReport report;
    report.params = params;
    report.entangle = schedule;
    report.sigma_ent = state.cov;
    const GaussianState collective = change_basis(state, collective_basis_map(2));
    report.collective_variances = collective.cov.diagonal();
    report.e_n_ent = log_negativity(state);
    report.criteria = generation_criteria(params);
    return {state, report};
}

Eigen::Matrix4d closed_form_sigma_ent(const SystemParams& params) {
    const double n1 = params.n1(), n2 = params.n2();
    const double chi2 = params.chi_eff() * params.chi_eff();
    const double m = 1.0 + 2.0 * (n1 + n2) * chi2;

    const double a1 = n1 + 0.5 * chi2 - 2.0 * n1 * n1 * chi2 / m;
    const double a2 = n2 + 0.5 * chi2 - 2.0 * n2 * n2 * chi2 / m;
    const double c = -(0.5 * chi2 + 2.0 * n1 * n2 * chi2 / m);

    Eigen::Matrix4d sigma = Eigen::Matrix4d::Zero();
    sigma(0, 0) = sigma(1, 1) = a1;
    sigma(2, 2) = sigma(3, 3) = a2;
    // Cross block proportional to sigma_z: positions correlate, momenta
    // anti-correlate.
    sigma(0, 2) = sigma(2, 0) = c;
    sigma(1, 3) = sigma(3, 1) = -c;
    return sigma;
}

ClosedFormEigs closed_form_eigenvalues(const SystemParams& params) {
    const double n1 = params.n1(), n2 = params.n2();
    const double chi2 = params.chi_eff() * params.chi_eff();
    const double a = 0.5 * (n1 + n2), d = 0.5 * (n1 - n2);
    const double m = 1.0 + 4.0 * a * chi2;

    // Collective position block [[a/m, d/m], [d/m, a + chi^2 - 4 chi^2 d^2/m]];
    // the momentum block shares the same spectrum.
    const double v_sq = a / m;
    const double v_anti = a + chi2 - 4.0 * chi2 * d * d / m;
    const double cross = d / m;
    const double tr = v_sq + v_anti;
    const double det = v_sq * v_anti - cross * cross;
    const double disc = std::sqrt(std::max(0.0, tr * tr - 4.0 * det));

    ClosedFormEigs eigs;
    eigs.squeezed = 0.5 * (tr - disc);
    eigs.anti_squeezed = 0.5 * (tr + disc);
    eigs.squeezed_limit = chi2 > 0.0 ? 1.0 / (4.0 * chi2) : a;
    eigs.anti_squeezed_limit = 2.0 * n1 * n2 / (n1 + n2);
    return eigs;
}

ProtocolReport run_verify(const GaussianState& state_after_entangle,
                          const SystemParams& params,
                          const EntangleSchedule& entangle,
                          const VerifySchedule& verify,
                          bool include_readout_imprecision) {
    params.validate();
    if (!(verify.d_plus > 0.0) || !(verify.d_minus > 0.0) || !(verify.d_cross > 0.0))
        throw std::invalid_argument("run_verify: delays must be positive");
    if (state_after_entangle.n_modes != 2)
        throw std::invalid_argument("run_verify: expects a 2-mode state");

    const double tau = entangle.tau;
    double v_plus = realigned_position_variance(state_after_entangle, params,
                                                tau + verify.d_plus, verify.d_plus);
    double v_minus = realigned_position_variance(state_after_entangle, params,
                                                 tau + verify.d_minus, verify.d_minus);
    double v_cross = realigned_position_variance(state_after_entangle, params,
                                                 tau + verify.d_cross, verify.d_cross);
    if (include_readout_imprecision) {
        const double s = params.kick();
        const double imprecision = s > 0.0 ? 0.5 / (s * s) : 0.0;
        v_plus += imprecision;
        v_minus += imprecision;
        v_cross += imprecision;
    }

    ProtocolReport report;
    report.params = params;
    report.entangle = entangle;
    report.verify = verify;
    report.has_verify = true;
    report.sigma_ent = state_after_entangle.cov;
    const GaussianState collective =
        change_basis(state_after_entangle, collective_basis_map(2));
    report.collective_variances = collective.cov.diagonal();
    report.e_n_ent = log_negativity(state_after_entangle);
    report.criteria = generation_criteria(params);

    // Diagonal reconstruction in the collective basis: the mixed-quadrature
    // branch stands in for both X- and P+.
    report.sigma_ver = Eigen::Vector4d(v_plus, v_cross, v_cross, v_minus).asDiagonal();
    const Eigen::Matrix4d b = beamsplitter();
    GaussianState reconstructed;
    reconstructed.n_modes = 2;
    reconstructed.mean = Eigen::VectorXd::Zero(4);
    reconstructed.cov = b.transpose() * report.sigma_ver * b;
    report.e_n_ver = log_negativity(reconstructed);

    // Full covariance at the X+ readout alignment, for judging the
    // zero-off-diagonals assumption.
    const GaussianState relaxed = decohere(state_after_entangle, verify.d_plus, params);
    const Eigen::Matrix4d f = measured_basis_map(params, tau + verify.d_plus);
    report.sigma_ver_true = f * relaxed.cov * f.transpose();
    return report;
}

SinglePulseResult single_pulse_entanglement(const SystemParams& params) {
    params.validate();
    SinglePulseResult result;

    GaussianState state = thermal_state(params.n1(), params.n2());
    PulseEvent pulse{0.0, params.chi1, params.chi2, OutcomePolicy::marginalize()};
    state = measure_position(state, params, pulse).first;
    result.sigma_exact = state.cov;
    result.e_n_exact = log_negativity(state);

    const double chi = params.chi_eff();
    const double n = params.n1();
    if (chi == 0.0) {
        result.sigma_idealized = result.sigma_exact;
        result.nu_idealized = ppt_minimum_eigenvalue(result.sigma_idealized);
        result.e_n_idealized = 0.0;
        result.below_threshold = false;
        return result;
    }

    // Large-occupation eigen-decomposition of the conditioned state in the
    // collective basis: measured position squeezed to 1/(4 chi^2), its
    // partner position conditioned to n/2, momenta left thermal at n/3, n.
    const Eigen::Vector4d diag(1.0 / (4.0 * chi * chi), 0.5 * n, n / 3.0, n);
    const Eigen::Matrix4d b = beamsplitter();
    result.sigma_idealized = b.transpose() * diag.asDiagonal() * b;
    result.nu_idealized = ppt_minimum_eigenvalue(result.sigma_idealized);
    GaussianState idealized;
    idealized.n_modes = 2;
    idealized.mean = Eigen::VectorXd::Zero(4);
    idealized.cov = result.sigma_idealized;
    result.e_n_idealized = log_negativity(idealized);
    result.below_threshold = n < 4.0 * chi * chi;
    return result;
}

}  // namespace pomsim
