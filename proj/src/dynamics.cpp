#include "pomsim/dynamics.hpp"

#include <cmath>
#include <stdexcept>

namespace pomsim {

namespace {

// In-plane rotation [[c, s], [-s, c]] of one (X, P) pair.
Eigen::Matrix2d rot2(double angle) {
    const double c = std::cos(angle), s = std::sin(angle);
    Eigen::Matrix2d r;
    r << c, s, -s, c;
    return r;
}

}  // namespace

Eigen::Matrix4d average_rotation(double omega_avg, double t) {
    Eigen::Matrix4d r = Eigen::Matrix4d::Zero();
    r.topLeftCorner<2, 2>() = rot2(omega_avg * t);
    r.bottomRightCorner<2, 2>() = rot2(omega_avg * t);
    return r;
}

Eigen::Matrix4d relative_rotation(double omega_rel, double t) {
    const double c = std::cos(omega_rel * t), s = std::sin(omega_rel * t);
    Eigen::Matrix4d r;
    r << c, 0, 0, s,
         0, c, -s, 0,
         0, s, c, 0,
         -s, 0, 0, c;
    return r;
}

RotationSet rotation_matrices(const SystemParams& params, double t) {
    if (!std::isfinite(t))
        throw std::invalid_argument("rotation_matrices: time must be finite");
    RotationSet set;
    set.t = t;
    set.r_omega = Eigen::Matrix<double, 6, 6>::Identity();
    set.r_Omega = Eigen::Matrix<double, 6, 6>::Identity();
    set.r_omega.topLeftCorner<4, 4>() = average_rotation(params.omega_avg(), t);
    set.r_Omega.topLeftCorner<4, 4>() = relative_rotation(params.omega_rel(), t);
    set.p_t = set.r_omega * set.r_Omega;
    return set;
}

CouplingTransform coupling_transform(double chi1, double chi2) {
    if (chi1 < 0.0 || chi2 < 0.0)
        throw std::invalid_argument("coupling_transform: strengths must be nonnegative");
    if (chi1 == 0.0 && chi2 == 0.0)
        throw std::invalid_argument("coupling_transform: at least one strength must be nonzero");
    CouplingTransform ct;
    ct.g_avg = 0.5 * (chi1 + chi2);
    ct.g_diff = 0.5 * (chi1 - chi2);
    const double norm = std::sqrt(ct.g_avg * ct.g_avg + ct.g_diff * ct.g_diff);
    const double c = ct.g_avg / norm, s = ct.g_diff / norm;
    ct.t_matrix << c, 0, s, 0,
                   0, c, 0, s,
                   -s, 0, c, 0,
                   0, -s, 0, c;
    return ct;
}

Eigen::Matrix4d measured_basis_map(const SystemParams& params, double t) {
    const Eigen::Matrix4d rotations =
        average_rotation(params.omega_avg(), t) * relative_rotation(params.omega_rel(), t);
    // With no pulse coupling there is nothing to mix; keep the plain rotated
    // collective basis so zero-strength pulses degrade to no-ops.
    if (params.chi1 == 0.0 && params.chi2 == 0.0)
        return rotations * beamsplitter();
    const CouplingTransform ct = coupling_transform(params.chi1, params.chi2);
    return ct.t_matrix * rotations * beamsplitter();
}

GaussianState decohere(const GaussianState& state, double t, const SystemParams& params) {
    if (t < 0.0)
        throw std::invalid_argument("decohere: time must be nonnegative");
    if (state.n_modes != 2 && state.n_modes != 3)
        throw std::invalid_argument("decohere: expects a 2- or 3-mode state");

    const double g1 = std::exp(-params.gamma1() * t);
    const double g2 = std::exp(-params.gamma2() * t);
    Eigen::VectorXd g = Eigen::VectorXd::Ones(state.dim());
    Eigen::VectorXd plateau = Eigen::VectorXd::Zero(state.dim());
    g(0) = g(1) = g1;
    g(2) = g(3) = g2;
    plateau(0) = plateau(1) = params.n1();
    plateau(2) = plateau(3) = params.n2();

    const Eigen::VectorXd sqrt_g = g.cwiseSqrt();
    GaussianState out;
    out.n_modes = state.n_modes;
    out.mean = sqrt_g.cwiseProduct(state.mean);
    out.cov = sqrt_g.asDiagonal() * state.cov * sqrt_g.asDiagonal();
    out.cov += ((Eigen::VectorXd::Ones(state.dim()) - g).cwiseProduct(plateau)).asDiagonal();
    return out;
}

}  // namespace pomsim
