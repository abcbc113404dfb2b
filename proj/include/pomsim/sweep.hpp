#pragma once

#include <string>
#include <vector>

#include "pomsim/params.hpp"
#include "pomsim/protocol.hpp"

namespace pomsim {

// One sweep axis: inclusive endpoints, linear or logarithmic spacing.
struct Axis {
    std::string name;
    double min = 0.0;
    double max = 1.0;
    int count = 2;
    enum class Scale { linear, log } scale = Scale::linear;

    std::vector<double> values() const;
};

// Result table of a sweep: axis definitions plus one row per grid point.
// Rows are ordered with the last axis fastest.
struct SweepGrid {
    std::vector<Axis> axes;
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

// Controls for the delay optimizers: coarse scan resolution, simplex
// stopping tolerance (in the objective), evaluation budget, and the
// fractional box around the default verification delays.
struct OptimizerConfig {
    enum class Method { grid_refine, simplex } method = Method::simplex;
    double tolerance = 1e-6;
    int max_evals = 2000;
    int coarse_points = 64;
    double delay_bound_fraction = 0.035;
};

// Entanglement and verification negativity versus quality factor, one curve
// per listed measurement strength. Columns: chi, q, e_n_ent, e_n_ver.
SweepGrid sweep_en_vs_q(const std::vector<double>& chi_list, const Axis& q_axis,
                        const SystemParams& params, int workers = 0);

// Entanglement negativity over (pulse delay, frequency ratio). Columns:
// tau, ratio, e_n_ent.
SweepGrid sweep_timing_heatmap(const Axis& tau_axis, const Axis& ratio_axis,
                               const SystemParams& params, int workers = 0);

struct DelayOptimum {
    double tau_star = 0.0;
    double e_n_star = 0.0;
};

// Best two-pulse delay near the fundamental lobe for a given frequency
// ratio: coarse scan over a bracket around tau*omega1 = pi/2, then local
// refinement. Returns e_n_star = 0 when no positive point exists.
DelayOptimum optimize_entangle_delay(double ratio, const SystemParams& params,
                                     const OptimizerConfig& cfg = {});

struct VerifyOptimum {
    double tau_star = 0.0;
    double e_n_ent_star = 0.0;
    VerifySchedule delays;
    double e_n_ver_star = 0.0;
};

// Best verification delays at the optimized entangling delay: per-delay
// coarse scans of the branch variances inside the fractional box around the
// defaults, then a joint simplex refinement of the reconstructed negativity.
VerifyOptimum optimize_verification(double ratio, const SystemParams& params,
                                    const OptimizerConfig& cfg = {});

// Delay-optimized verification across a frequency-ratio axis. Columns:
// ratio, tau_star, e_n_ent_star, d_plus, d_minus, d_cross, e_n_ver_star.
SweepGrid sweep_verify_opt(const Axis& ratio_axis, const SystemParams& params,
                           const OptimizerConfig& cfg = {}, int workers = 0);

// Negativities versus coupling mismatch epsilon = chi2/chi1 - 1, one curve
// per listed chi1. Columns: chi1, epsilon, e_n_ent, e_n_ver.
SweepGrid sweep_coupling_mismatch(const Axis& epsilon_axis,
                                  const std::vector<double>& chi1_list,
                                  const SystemParams& params, int workers = 0);

// Delay-optimized entanglement over (frequency ratio, chi2/chi1). Columns:
// ratio, mismatch, tau_star, e_n_star.
SweepGrid sweep_max_en_heatmap(const Axis& ratio_axis, const Axis& mismatch_axis,
                               const SystemParams& params,
                               const OptimizerConfig& cfg = {}, int workers = 0);

}  // namespace pomsim
