#pragma once

#include <Eigen/Dense>

#include "pomsim/gaussian_state.hpp"
#include "pomsim/measurement.hpp"
#include "pomsim/params.hpp"

namespace pomsim {

// Two-pulse entangling sequence: pulses at t=0 and t=tau. For commensurate
// frequencies the productive delays come in a family indexed by (k,l) via
// tau*omega1 = (2k+1)pi/2 and tau*omega2 = (2k+3)pi/2 + 2l*pi, which makes
// the second pulse read the conjugate collective quadrature of the first.
struct EntangleSchedule {
    int k = 0;
    int l = 0;
    double tau = 0.0;

    bool operator==(const EntangleSchedule&) const = default;
};

// Delay tau for the (k,l) doublet, plus the frequency ratio that makes that
// doublet exact.
EntangleSchedule make_entangle_schedule(const SystemParams& params, int k, int l);
double ideal_ratio_for_doublet(int k, int l);

// Readout delays of the three verification branches, measured from the last
// entangling pulse. Defaults realign the readout with X+, P-, and the mixed
// (X- + P+)/sqrt2 quadrature at omega2 = 3*omega1.
struct VerifySchedule {
    double d_plus = 0.0;
    double d_minus = 0.0;
    double d_cross = 0.0;

    bool operator==(const VerifySchedule&) const = default;
};

VerifySchedule default_verify_schedule(const SystemParams& params);

// Necessary conditions for the two-pulse sequence to entangle, with signed
// margins (positive = satisfied). The decoherence load is
// D = pi*n1*(1/Q1 + 1/Q2), i.e. 2*pi*n/Q at equal quality factors.
struct GenerationCriteria {
    bool chi_above_threshold = false;   // chi_eff > 1/sqrt(2)
    double chi_margin = 0.0;
    bool q_above_minimum = false;       // (4*chi^4 - 1)/chi^2 > D
    double q_margin = 0.0;
    bool decoherence_small = false;     // D < 1
    double decoherence_margin = 0.0;

    bool all() const { return chi_above_threshold && q_above_minimum && decoherence_small; }
};

GenerationCriteria generation_criteria(const SystemParams& params);

// Everything a run produces: the entangled covariance, the diagonal
// reconstruction from the verification branches, both negativities, and the
// criteria flags. sigma_ver is expressed in the collective basis; the full
// covariance at the X+ readout alignment is kept alongside so the
// vanishing-off-diagonals assumption of the reconstruction can be checked.
struct ProtocolReport {
    SystemParams params;
    EntangleSchedule entangle;
    VerifySchedule verify;
    bool has_verify = false;

    Eigen::Matrix4d sigma_ent = Eigen::Matrix4d::Zero();      // canonical basis
    Eigen::Vector4d collective_variances = Eigen::Vector4d::Zero();  // (X+,P+,X-,P-)
    Eigen::Matrix4d sigma_ver = Eigen::Matrix4d::Zero();      // collective basis, diagonal
    Eigen::Matrix4d sigma_ver_true = Eigen::Matrix4d::Zero(); // full, at X+ readout alignment
    double e_n_ent = 0.0;
    double e_n_ver = 0.0;
    GenerationCriteria criteria;
};

// Run the two-pulse sequence from a fresh thermal state: measure at t=0,
// free decoherent evolution for tau, measure at t=tau. Returns the final
// canonical 2-mode state and a report without verification data.
std::pair<GaussianState, ProtocolReport>
run_entangle(const SystemParams& params, const EntangleSchedule& schedule);

// Exact closed form of the post-sequence covariance for ideal frequencies
// (omega2 = 3*omega1), equal couplings and no decoherence, in the canonical
// basis. Valid for arbitrary occupations and strengths.
Eigen::Matrix4d closed_form_sigma_ent(const SystemParams& params);

// Eigen-parameterization of the closed form: the squeezed/anti-squeezed
// eigenvalue pair of the collective position block (shared by the momentum
// block), together with their large-occupation limits 1/(4 chi^2) and
// 2 n1 n2/(n1+n2).
struct ClosedFormEigs {
    double squeezed = 0.0;
    double anti_squeezed = 0.0;
    double squeezed_limit = 0.0;
    double anti_squeezed_limit = 0.0;
};

ClosedFormEigs closed_form_eigenvalues(const SystemParams& params);

// Measure the three verification variances on independent copies of the
// post-entanglement state: each branch decoheres for its delay and reads the
// realigned position quadrature at absolute time tau + delay. Off-diagonals
// of the reconstruction are taken as zero. When include_readout_imprecision
// is set, the homodyne shot-noise floor 1/(2*kick^2) is added to each
// reconstructed variance instead of being deconvolved away.
ProtocolReport run_verify(const GaussianState& state_after_entangle,
                          const SystemParams& params,
                          const EntangleSchedule& entangle,
                          const VerifySchedule& verify,
                          bool include_readout_imprecision = false);

// Single-pulse two-mode squeezing: the exact conditioned state after one
// pulse at t=0, its idealized large-occupation eigen-decomposition
// diag(1/(4 chi^2), n/2, n/3, n) in the collective basis (n = n1, with the
// n1 = 3 n2 convention), and the survival threshold n < 4 chi^2 expressed
// through the smallest partial-transpose eigenvalue of the idealized state.
struct SinglePulseResult {
    Eigen::Matrix4d sigma_exact = Eigen::Matrix4d::Zero();      // canonical
    Eigen::Matrix4d sigma_idealized = Eigen::Matrix4d::Zero();  // canonical
    double e_n_exact = 0.0;
    double e_n_idealized = 0.0;
    double nu_idealized = 0.0;   // smallest PT symplectic eigenvalue, crosses 1 at n = 4 chi^2
    bool below_threshold = false;  // n < 4 chi^2
};

SinglePulseResult single_pulse_entanglement(const SystemParams& params);

}  // namespace pomsim
