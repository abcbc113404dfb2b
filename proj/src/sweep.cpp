#include "pomsim/sweep.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <stdexcept>
#include <thread>

#include "pomsim/dynamics.hpp"
#include "pomsim/optimize.hpp"

namespace pomsim {

namespace {

constexpr double kPi = std::numbers::pi;

// Run fn(0..n-1) on a strided worker pool. Every result slot is written by
// exactly one index, so the assembled output is identical for any worker
// count.
void parallel_for(int n, int workers, const std::function<void(int)>& fn) {
    int w = workers > 0 ? workers
                        : static_cast<int>(std::thread::hardware_concurrency());
    w = std::max(1, std::min(w, n));
    if (w == 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(w);
    for (int t = 0; t < w; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += w) fn(i);
        });
    for (auto& th : pool) th.join();
}

double entangle_negativity(const SystemParams& params, double tau) {
    EntangleSchedule schedule;
    schedule.tau = tau;
    return run_entangle(params, schedule).second.e_n_ent;
}

// Variance of the realigned position readout a delay d after the second
// pulse, for a state entangled with delay tau.
double verify_branch_variance(const GaussianState& state, const SystemParams& params,
                              double tau, double d) {
    const GaussianState relaxed = decohere(state, d, params);
    const Eigen::Matrix4d f = measured_basis_map(params, tau + d);
    return (f * relaxed.cov * f.transpose())(0, 0);
}

// Negativity of the diagonal reconstruction diag(v+, vx, vx, v-) in the
// collective basis: the partial transpose pairs X+ with P- and P+ with X-.
double reconstructed_negativity(double v_plus, double v_cross, double v_minus) {
    const double nu = std::min(std::sqrt(v_plus * v_minus), v_cross);
    return std::max(0.0, -std::log2(2.0 * nu));
}

SystemParams with_ratio(const SystemParams& params, double ratio) {
    SystemParams p = params;
    p.omega2 = ratio * p.omega1;
    return p;
}

}  // namespace

std::vector<double> Axis::values() const {
    if (count < 2) throw std::invalid_argument("Axis: count must be at least 2");
    if (!(min < max)) throw std::invalid_argument("Axis: min must be below max");
    std::vector<double> v(count);
    if (scale == Scale::log) {
        if (!(min > 0.0)) throw std::invalid_argument("Axis: log scale needs positive bounds");
        const double l0 = std::log(min), l1 = std::log(max);
        for (int i = 0; i < count; ++i)
            v[i] = std::exp(l0 + (l1 - l0) * i / (count - 1));
    } else {
        for (int i = 0; i < count; ++i)
            v[i] = min + (max - min) * i / (count - 1);
    }
    return v;
}

SweepGrid sweep_en_vs_q(const std::vector<double>& chi_list, const Axis& q_axis,
                        const SystemParams& params, int workers) {
    if (chi_list.empty())
        throw std::invalid_argument("sweep_en_vs_q: need at least one chi");
    const std::vector<double> qs = q_axis.values();
    const int nq = static_cast<int>(qs.size());
    const int n = static_cast<int>(chi_list.size()) * nq;

    SweepGrid grid;
    grid.axes = {q_axis};
    grid.columns = {"chi", "q", "e_n_ent", "e_n_ver"};
    grid.rows.resize(n);
    parallel_for(n, workers, [&](int i) {
        const double chi = chi_list[i / nq];
        const double q = qs[i % nq];
        SystemParams p = params;
        p.chi1 = p.chi2 = chi;
        p.q1 = p.q2 = q;
        const EntangleSchedule schedule = make_entangle_schedule(p, 0, 0);
        auto [state, report] = run_entangle(p, schedule);
        const ProtocolReport ver =
            run_verify(state, p, schedule, default_verify_schedule(p));
        grid.rows[i] = {chi, q, report.e_n_ent, ver.e_n_ver};
    });
    return grid;
}

SweepGrid sweep_timing_heatmap(const Axis& tau_axis, const Axis& ratio_axis,
                               const SystemParams& params, int workers) {
    const std::vector<double> taus = tau_axis.values();
    const std::vector<double> ratios = ratio_axis.values();
    const int nr = static_cast<int>(ratios.size());
    const int n = static_cast<int>(taus.size()) * nr;

    SweepGrid grid;
    grid.axes = {tau_axis, ratio_axis};
    grid.columns = {"tau", "ratio", "e_n_ent"};
    grid.rows.resize(n);
    parallel_for(n, workers, [&](int i) {
        const double tau = taus[i / nr];
        const double ratio = ratios[i % nr];
        const SystemParams p = with_ratio(params, ratio);
        grid.rows[i] = {tau, ratio, entangle_negativity(p, tau)};
    });
    return grid;
}

DelayOptimum optimize_entangle_delay(double ratio, const SystemParams& params,
                                     const OptimizerConfig& cfg) {
    if (!(ratio > 0.0))
        throw std::invalid_argument("optimize_entangle_delay: ratio must be positive");
    const SystemParams p = with_ratio(params, ratio);

    // Bracket around the fundamental realignment delay tau = pi/omega_avg,
    // which continues the ideal (0,0) doublet away from ratio 3. Narrow
    // enough to exclude the next realignment lobe.
    const double center = kPi / p.omega_avg();
    const double lo = 0.55 * center, hi = 1.55 * center;
    const auto objective = [&](double tau) { return -entangle_negativity(p, tau); };

    const int coarse = std::max(cfg.coarse_points, 8);
    const int best = coarse_grid_argmin(objective, lo, hi, coarse);
    const double step = (hi - lo) / (coarse - 1);
    const double rlo = std::max(lo, lo + best * step - step);
    const double rhi = std::min(hi, lo + best * step + step);

    OptimizeResult refined;
    if (cfg.method == OptimizerConfig::Method::grid_refine) {
        // Repeatedly zoom a fixed-resolution grid around the running best.
        double a = rlo, b = rhi;
        refined.x = Eigen::VectorXd::Constant(1, lo + best * step);
        refined.f = objective(refined.x(0));
        while (b - a > 1e-9) {
            const int k = coarse_grid_argmin(objective, a, b, coarse);
            const double s = (b - a) / (coarse - 1);
            const double x = a + k * s;
            const double f = objective(x);
            if (f < refined.f) {
                refined.f = f;
                refined.x(0) = x;
            }
            a = std::max(a, x - s);
            b = std::min(b, x + s);
        }
    } else {
        refined = golden_section_minimize(objective, rlo, rhi, 1e-9, cfg.max_evals);
    }

    DelayOptimum optimum;
    optimum.tau_star = refined.x(0);
    optimum.e_n_star = -refined.f;
    if (optimum.e_n_star <= 0.0) optimum.e_n_star = 0.0;
    return optimum;
}

VerifyOptimum optimize_verification(double ratio, const SystemParams& params,
                                    const OptimizerConfig& cfg) {
    const SystemParams p = with_ratio(params, ratio);
    const DelayOptimum tau_opt = optimize_entangle_delay(ratio, params, cfg);

    VerifyOptimum optimum;
    optimum.tau_star = tau_opt.tau_star;
    optimum.e_n_ent_star = tau_opt.e_n_star;

    EntangleSchedule schedule;
    schedule.tau = tau_opt.tau_star;
    const GaussianState state = run_entangle(p, schedule).first;

    const VerifySchedule d0 = default_verify_schedule(p);
    const double f = cfg.delay_bound_fraction;
    const Eigen::Vector3d base(d0.d_plus, d0.d_minus, d0.d_cross);
    const Eigen::Vector3d lo = base * (1.0 - f);
    const Eigen::Vector3d hi = base * (1.0 + f);

    const auto branch_var = [&](double d) {
        return verify_branch_variance(state, p, schedule.tau, d);
    };

    // Coarse stage: the squeezed branches want minimal variance, the mixed
    // branch must stay large so it never binds the reconstruction.
    const int coarse = std::max(cfg.coarse_points, 8);
    Eigen::Vector3d x0;
    for (int i = 0; i < 3; ++i) {
        const auto per_delay = [&](double d) {
            const double v = branch_var(d);
            return i == 2 ? -v : v;
        };
        const int best = coarse_grid_argmin(per_delay, lo(i), hi(i), coarse);
        x0(i) = lo(i) + (hi(i) - lo(i)) * best / (coarse - 1);
    }

    const auto clip = [&](const Eigen::VectorXd& x) {
        Eigen::Vector3d c;
        for (int i = 0; i < 3; ++i) c(i) = std::clamp(x(i), lo(i), hi(i));
        return c;
    };
    const auto objective = [&](const Eigen::VectorXd& x) {
        const Eigen::Vector3d c = clip(x);
        const double penalty = (x.head(3) - c).cwiseAbs().maxCoeff() > 0.0 ? 1.0 : 0.0;
        const double e = reconstructed_negativity(branch_var(c(0)), branch_var(c(2)),
                                                  branch_var(c(1)));
        return -e + penalty;
    };
    const OptimizeResult refined =
        nelder_mead_minimize(objective, x0, 1e-9, 1e-9, cfg.max_evals);

    const Eigen::Vector3d d_star = clip(refined.x);
    optimum.delays = VerifySchedule{d_star(0), d_star(1), d_star(2)};
    const ProtocolReport report =
        run_verify(state, p, schedule, optimum.delays);
    optimum.e_n_ver_star = report.e_n_ver;
    return optimum;
}

SweepGrid sweep_verify_opt(const Axis& ratio_axis, const SystemParams& params,
                           const OptimizerConfig& cfg, int workers) {
    const std::vector<double> ratios = ratio_axis.values();
    const int n = static_cast<int>(ratios.size());

    SweepGrid grid;
    grid.axes = {ratio_axis};
    grid.columns = {"ratio", "tau_star", "e_n_ent_star",
                    "d_plus", "d_minus", "d_cross", "e_n_ver_star"};
    grid.rows.resize(n);
    parallel_for(n, workers, [&](int i) {
        const VerifyOptimum opt = optimize_verification(ratios[i], params, cfg);
        grid.rows[i] = {ratios[i], opt.tau_star, opt.e_n_ent_star,
                        opt.delays.d_plus, opt.delays.d_minus, opt.delays.d_cross,
                        opt.e_n_ver_star};
    });
    return grid;
}

SweepGrid sweep_coupling_mismatch(const Axis& epsilon_axis,
                                  const std::vector<double>& chi1_list,
                                  const SystemParams& params, int workers) {
    if (chi1_list.empty())
        throw std::invalid_argument("sweep_coupling_mismatch: need at least one chi1");
    const std::vector<double> eps = epsilon_axis.values();
    const int ne = static_cast<int>(eps.size());
    const int n = static_cast<int>(chi1_list.size()) * ne;

    SweepGrid grid;
    grid.axes = {epsilon_axis};
    grid.columns = {"chi1", "epsilon", "e_n_ent", "e_n_ver"};
    grid.rows.resize(n);
    parallel_for(n, workers, [&](int i) {
        const double chi1 = chi1_list[i / ne];
        const double e = eps[i % ne];
        SystemParams p = params;
        p.chi1 = chi1;
        p.chi2 = std::max(0.0, chi1 * (1.0 + e));
        const EntangleSchedule schedule = make_entangle_schedule(p, 0, 0);
        auto [state, report] = run_entangle(p, schedule);
        const ProtocolReport ver =
            run_verify(state, p, schedule, default_verify_schedule(p));
        grid.rows[i] = {chi1, e, report.e_n_ent, ver.e_n_ver};
    });
    return grid;
}

SweepGrid sweep_max_en_heatmap(const Axis& ratio_axis, const Axis& mismatch_axis,
                               const SystemParams& params,
                               const OptimizerConfig& cfg, int workers) {
    const std::vector<double> ratios = ratio_axis.values();
    const std::vector<double> mismatches = mismatch_axis.values();
    const int nm = static_cast<int>(mismatches.size());
    const int n = static_cast<int>(ratios.size()) * nm;

    SweepGrid grid;
    grid.axes = {ratio_axis, mismatch_axis};
    grid.columns = {"ratio", "mismatch", "tau_star", "e_n_star"};
    grid.rows.resize(n);
    parallel_for(n, workers, [&](int i) {
        const double ratio = ratios[i / nm];
        const double mismatch = mismatches[i % nm];
        SystemParams p = params;
        p.chi2 = mismatch * p.chi1;
        const DelayOptimum opt = optimize_entangle_delay(ratio, p, cfg);
        grid.rows[i] = {ratio, mismatch, opt.tau_star, opt.e_n_star};
    });
    return grid;
}

}  // namespace pomsim
