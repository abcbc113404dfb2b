#pragma once

#include <Eigen/Dense>

#include "pomsim/gaussian_state.hpp"
#include "pomsim/params.hpp"

namespace pomsim {

// Free-evolution rotations at time t, acting on collective-ordered vectors
// (X+,P+,X-,P-,XL,PL) with the optical block as identity. r_omega rotates
// both collective modes by the average frequency; r_Omega mixes them through
// the relative frequency in the cross pattern that couples X+ with P- and
// P+ with X-. The composition p_t = r_omega * r_Omega carries the collective
// basis to the instantaneous eigenbasis of the free evolution.
struct RotationSet {
    double t = 0.0;
    Eigen::Matrix<double, 6, 6> r_omega;
    Eigen::Matrix<double, 6, 6> r_Omega;
    Eigen::Matrix<double, 6, 6> p_t;
};

// Asymmetric-coupling mixer: when the two pulse couplings differ, the
// measured mode is rotated inside the (+,-) pair by an angle set by the
// normalized average and difference couplings. Identity at equal couplings.
struct CouplingTransform {
    double g_avg = 0.0;
    double g_diff = 0.0;
    Eigen::Matrix4d t_matrix;
};

// 4x4 rotation of both collective modes by angle omega_avg * t.
Eigen::Matrix4d average_rotation(double omega_avg, double t);

// 4x4 cross-pattern mixing of the collective pair by angle omega_rel * t.
Eigen::Matrix4d relative_rotation(double omega_rel, double t);

RotationSet rotation_matrices(const SystemParams& params, double t);

CouplingTransform coupling_transform(double chi1, double chi2);

// Full canonical -> measured-basis map at time t: beamsplitter into the
// collective pair, free-evolution rotations, then the coupling mixer. Row 0
// of the result is the quadrature a pulse at time t actually reads out.
Eigen::Matrix4d measured_basis_map(const SystemParams& params, double t);

// Thermal contact over a time interval: cov -> sqrtG cov sqrtG + (1-G) N
// with per-mode decay factors exp(-gamma_i t) and thermal plateau
// diag(n1,n1,n2,n2); means decay by sqrtG. Acts in the canonical basis; for
// a 3-mode state the optical block is untouched.
GaussianState decohere(const GaussianState& state, double t, const SystemParams& params);

}  // namespace pomsim
