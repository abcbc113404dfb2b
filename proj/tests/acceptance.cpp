#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "pomsim/config.hpp"
#include "pomsim/dynamics.hpp"
#include "pomsim/gaussian_state.hpp"
#include "pomsim/measurement.hpp"
#include "pomsim/protocol.hpp"
#include "pomsim/run.hpp"
#include "pomsim/sweep.hpp"

using namespace pomsim;

namespace {

constexpr double kPi = std::numbers::pi;

// Accumulates the verdict of one acceptance check so the summary line and the
// individual assertions cannot disagree: every condition goes through note().
struct Verdict {
    bool ok = true;
    bool note(bool pass) {
        ok = ok && pass;
        return pass;
    }
};

// One machine-readable line per criterion; the test driver greps for it.
void announce(int number, const std::string& title, bool pass, const std::string& details) {
    std::printf("ACCEPTANCE %02d %s: %s -- %s\n", number, title.c_str(),
                pass ? "PASS" : "FAIL", details.c_str());
    std::fflush(stdout);
}

std::string fmt(double value, int digits = 6) {
    std::ostringstream s;
    s << std::setprecision(digits) << value;
    return s.str();
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

TEST_CASE("criterion 01 ideal two-pulse covariance matches the closed form") {
    // An order of magnitude of headroom: the worst relative deviation across
    // this seeded draw measures 7.0e-12.
    constexpr double kRelTol = 1e-10;
    constexpr double kTimeBudget = 1.0;  // seconds for all 100 cases
    constexpr int kCases = 100;

    std::mt19937_64 rng(20250801ULL);
    std::uniform_real_distribution<double> log_n(std::log(0.5), std::log(1e6));
    std::uniform_real_distribution<double> chi_draw(0.0, 10.0);

    const auto start = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int c = 0; c < kCases; ++c) {
        SystemParams params;  // ratio 3 by default
        params.q1 = params.q2 = 1e300;  // decoherence off
        params.n_th1 = std::exp(log_n(rng)) - 0.5;
        params.n_th2 = std::exp(log_n(rng)) - 0.5;
        params.chi1 = params.chi2 = chi_draw(rng);

        const EntangleSchedule schedule = make_entangle_schedule(params, 0, 0);
        const Eigen::Matrix4d sim = run_entangle(params, schedule).second.sigma_ent;
        const Eigen::Matrix4d ref = closed_form_sigma_ent(params);
        const double scale = ref.cwiseAbs().maxCoeff();
        worst = std::max(worst, (sim - ref).cwiseAbs().maxCoeff() / scale);
    }
    const double elapsed = seconds_since(start);

    Verdict v;
    CHECK(v.note(worst <= kRelTol));
    CHECK(v.note(elapsed < kTimeBudget));
    announce(1, "ideal two-pulse covariance matches the closed form", v.ok,
             "100 randomized occupation/strength draws, worst relative deviation " +
                 fmt(worst, 3) + " (tolerance " + fmt(kRelTol, 2) + "), " +
                 fmt(elapsed, 3) + " s");
}

TEST_CASE("criterion 02 high-occupation eigenvalues reach the resolution and thermal limits") {
    // Worst measured deviation is 0.50% (the anti-squeezed value at chi=5).
    constexpr double kRelTol = 0.01;

    SystemParams params;
    params.q1 = params.q2 = 1e300;
    params.n_th1 = 1e4 - 0.5;        // total occupations exactly 1e4 and 1e4/3
    params.n_th2 = 1e4 / 3.0 - 0.5;
    const double anti_target =
        2.0 * params.n1() * params.n2() / (params.n1() + params.n2());

    Verdict v;
    std::ostringstream details;
    details << "targets 1/(4 chi^2) and " << fmt(anti_target, 6) << ";";
    for (const double chi : {1.0, 2.0, 5.0}) {
        params.chi1 = params.chi2 = chi;
        const auto [state, report] =
            run_entangle(params, make_entangle_schedule(params, 0, 0));
        const GaussianState coll = change_basis(state, collective_basis_map());
        Eigen::Matrix2d x_block;
        x_block << coll.cov(0, 0), coll.cov(0, 2), coll.cov(2, 0), coll.cov(2, 2);
        const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(x_block);
        const double squeezed = eig.eigenvalues()(0);
        const double anti = eig.eigenvalues()(1);
        const double squeezed_target = 1.0 / (4.0 * chi * chi);

        CHECK(v.note(std::abs(squeezed / squeezed_target - 1.0) <= kRelTol));
        CHECK(v.note(std::abs(anti / anti_target - 1.0) <= kRelTol));
        details << " chi=" << fmt(chi, 3) << ": " << fmt(squeezed, 6) << " / "
                << fmt(anti, 6) << ";";
    }
    details << " tolerance 1%";
    announce(2, "high-occupation eigenvalues reach the resolution and thermal limits",
             v.ok, details.str());
}

TEST_CASE("criterion 03 decoherent collective variances match the leading-order form") {
    // The generous budget covers the truncated higher orders in n/Q; the
    // measured worst relative error is 8.8e-4 at every quality factor, set by
    // the backaction offset chi^2 on the hot quadratures rather than by Q.
    constexpr double kMidQRelTol = 0.01;  // hard bound at Q = 1e6

    SystemParams params;  // chi 2, n_th 1e4 and 1e4/3, ratio 3
    const double n = params.n1();
    const double chi = params.chi_eff();

    Verdict v;
    std::ostringstream details;
    for (const double q : {1e5, 1e6, 1e7}) {
        params.q1 = params.q2 = q;
        const ProtocolReport report =
            run_entangle(params, make_entangle_schedule(params, 0, 0)).second;
        const Eigen::Vector4d target(
            1.0 / (4.0 * chi * chi) + kPi * n / 4.0 * (1.0 / params.q1 + 1.0 / params.q2),
            0.5 * n, 0.5 * n, 1.0 / (4.0 * chi * chi));
        double rel = 0.0;
        for (int i = 0; i < 4; ++i)
            rel = std::max(rel,
                           std::abs(report.collective_variances(i) - target(i)) / target(i));

        const double budget = 10.0 * (n / q + 1.0 / q);
        CHECK(v.note(rel <= budget));
        if (q == 1e6) CHECK(v.note(rel <= kMidQRelTol));
        details << " Q=" << fmt(q, 2) << ": rel err " << fmt(rel, 3) << ";";
    }
    announce(3, "decoherent collective variances match the leading-order form", v.ok,
             "four collective variances vs diag(1/4chi^2 + pi n/4 (1/Q1+1/Q2), n/2, n/2, "
             "1/4chi^2);" + details.str() + " bound 1% at Q=1e6");
}

TEST_CASE("criterion 04 negativity curves cross zero at the predicted quality factors") {
    constexpr double kOrderSlack = 1e-9;  // verification may never exceed generation
    constexpr double kTimeBudget = 10.0;  // seconds, single worker
    const std::vector<double> chis = {1.0, 2.0, 3.0, 4.0, 5.0};
    const Axis q_axis{"q", 1e2, 1e7, 200, Axis::Scale::log};

    SystemParams params;  // n_th 1e4 and 1e4/3
    const auto start = std::chrono::steady_clock::now();
    const SweepGrid grid = sweep_en_vs_q(chis, q_axis, params, 1);
    const double elapsed = seconds_since(start);

    const std::vector<double> qs = q_axis.values();
    const int nq = static_cast<int>(qs.size());
    const double step = qs[1] / qs[0];  // log-grid spacing ratio
    const double n = params.n1();

    Verdict v;
    bool ver_bounded = true;
    for (const auto& row : grid.rows) ver_bounded = ver_bounded && row[3] <= row[2] + kOrderSlack;
    CHECK(v.note(ver_bounded));

    // Last zero-to-positive transition of one column within one curve; the
    // crossing lies inside the returned bracket.
    const auto bracket = [&](int chi_index, int col) -> std::pair<double, double> {
        for (int i = nq - 1; i > 0; --i) {
            const double hi = grid.rows[chi_index * nq + i][col];
            const double lo = grid.rows[chi_index * nq + i - 1][col];
            if (hi > 0.0 && lo <= 0.0) return {qs[i - 1], qs[i]};
        }
        return {0.0, 0.0};
    };

    std::ostringstream details;
    for (int ci = 0; ci < static_cast<int>(chis.size()); ++ci) {
        const double chi = chis[ci];
        const double pred_ent =
            2.0 * kPi * n * chi * chi / (4.0 * std::pow(chi, 4) - 1.0);
        const double pred_ver = 2.0 * kPi * n / (1.0 - 1.0 / (2.0 * chi * chi));

        const auto [ent_lo, ent_hi] = bracket(ci, 2);
        CHECK(v.note(ent_lo > 0.0));
        CHECK(v.note(ent_lo / step <= pred_ent && pred_ent <= ent_hi * step));

        const auto [ver_lo, ver_hi] = bracket(ci, 3);
        CHECK(v.note(ver_lo > 0.0));
        CHECK(v.note(ver_lo / step <= pred_ver && pred_ver <= ver_hi * step));

        std::printf("  chi=%g: generation crosses zero in [%.4g, %.4g], predicted %.4g; "
                    "verification in [%.4g, %.4g], predicted %.4g\n",
                    chi, ent_lo, ent_hi, pred_ent, ver_lo, ver_hi, pred_ver);
    }
    CHECK(v.note(elapsed < kTimeBudget));
    announce(4, "negativity curves cross zero at the predicted quality factors", v.ok,
             "5 strengths x 200 quality factors; verification bounded by generation "
             "everywhere; all 10 predicted crossings within one grid step; " +
                 fmt(elapsed, 3) + " s");
}

TEST_CASE("criterion 05 timing-map maxima align with the delay doublets") {
    constexpr double kValueFloor = 0.5;       // only maxima above this count
    constexpr double kSerialBudget = 300.0;   // seconds, one worker
    constexpr double kParallelBudget = 60.0;  // seconds, up to eight workers
    const Axis tau_axis{"tau", 0.0, 3.0 * kPi, 200, Axis::Scale::linear};
    const Axis ratio_axis{"ratio", 1.0, 9.0, 200, Axis::Scale::linear};
    const SystemParams params;  // chi 2, Q 1e6, n_th 1e4 and 1e4/3

    const auto serial_start = std::chrono::steady_clock::now();
    const SweepGrid serial = sweep_timing_heatmap(tau_axis, ratio_axis, params, 1);
    const double serial_s = seconds_since(serial_start);

    const int worker_count = 8;  // explicit count; machine parallelism may be lower
    const auto parallel_start = std::chrono::steady_clock::now();
    const SweepGrid parallel = sweep_timing_heatmap(tau_axis, ratio_axis, params, worker_count);
    const double parallel_s = seconds_since(parallel_start);

    Verdict v;
    CHECK(v.note(serial.rows == parallel.rows));  // worker count is invisible in the data

    const std::vector<double> taus = tau_axis.values();
    const std::vector<double> ratios = ratio_axis.values();
    const int nt = static_cast<int>(taus.size());
    const int nr = static_cast<int>(ratios.size());
    const auto value = [&](int i, int j) { return serial.rows[i * nr + j][2]; };

    // Delay doublets inside the scanned window: tau*omega1 = (2k+1)pi/2 with
    // omega2/omega1 = (2k+3+4l)/(2k+1).
    std::vector<std::pair<double, double>> roots;  // (tau, ratio)
    for (int k = 0; (2 * k + 1) * kPi / 2.0 <= 3.0 * kPi + 1e-12; ++k)
        for (int l = 0;; ++l) {
            const double ratio = (2.0 * k + 3.0 + 4.0 * l) / (2.0 * k + 1.0);
            if (ratio > 9.0 + 1e-12) break;
            if (ratio >= 1.0 - 1e-12) roots.emplace_back((2 * k + 1) * kPi / 2.0, ratio);
        }

    const double cell_tau = (taus.back() - taus.front()) / (nt - 1);
    const double cell_ratio = (ratios.back() - ratios.front()) / (nr - 1);
    int maxima = 0;
    int aligned = 0;
    double worst_offset = 0.0;
    double worst_tau = 0.0, worst_ratio = 0.0, worst_value = 0.0;
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nr; ++j) {
            const double center = value(i, j);
            if (center <= kValueFloor) continue;
            bool strict = true;
            for (int di = -1; di <= 1 && strict; ++di)
                for (int dj = -1; dj <= 1 && strict; ++dj) {
                    if (di == 0 && dj == 0) continue;
                    const int ni = i + di, nj = j + dj;
                    if (ni < 0 || ni >= nt || nj < 0 || nj >= nr) continue;
                    strict = center > value(ni, nj);
                }
            if (!strict) continue;
            ++maxima;
            // Offset to the nearest root in cell units, per axis.
            double offset = std::numeric_limits<double>::infinity();
            for (const auto& [root_tau, root_ratio] : roots)
                offset = std::min(offset,
                                  std::max(std::abs(taus[i] - root_tau) / cell_tau,
                                           std::abs(ratios[j] - root_ratio) / cell_ratio));
            if (offset <= 1.0) {
                ++aligned;
            } else if (offset > worst_offset) {
                worst_offset = offset;
                worst_tau = taus[i];
                worst_ratio = ratios[j];
                worst_value = center;
            }
        }

    CHECK(v.note(maxima > 0));
    CHECK(v.note(maxima == aligned));  // every qualifying maximum must sit on a doublet
    CHECK(v.note(serial_s < kSerialBudget));
    CHECK(v.note(parallel_s < kParallelBudget));

    std::ostringstream details;
    details << maxima << " grid maxima above " << fmt(kValueFloor, 2) << ", " << aligned
            << " within one cell of the " << roots.size() << " doublet roots";
    if (aligned < maxima)
        details << "; farthest stray at tau=" << fmt(worst_tau, 4) << ", ratio="
                << fmt(worst_ratio, 4) << " (value " << fmt(worst_value, 3) << ", "
                << fmt(worst_offset, 3) << " cells out)";
    details << "; serial " << fmt(serial_s, 3) << " s, " << worker_count << " workers "
            << fmt(parallel_s, 3) << " s, identical rows";
    announce(5, "timing-map maxima align with the delay doublets", v.ok, details.str());
}

TEST_CASE("criterion 06 verified-entanglement ratio window is a few percent wide and lopsided") {
    constexpr double kHalfWidthLow = 0.03;   // mean relative half-width window
    constexpr double kHalfWidthHigh = 0.07;
    constexpr double kEdgePin = 0.005;       // one scan step around the measured edges
    constexpr double kLeftEdge = 2.85872;    // measured by bisection
    constexpr double kRightEdge = 3.15379;

    const SystemParams params;  // chi 2, Q 1e6, n_th 1e4 and 1e4/3
    const OptimizerConfig opt;
    const auto verified_star = [&](double ratio) {
        return optimize_verification(ratio, params, opt).e_n_ver_star;
    };

    const double scan_lo = 2.70, scan_step = 0.005;
    const int scan_count = 121;  // up to ratio 3.30 inclusive
    std::vector<double> ratios(scan_count), stars(scan_count);
    for (int i = 0; i < scan_count; ++i) {
        ratios[i] = scan_lo + scan_step * i;
        stars[i] = verified_star(ratios[i]);
    }

    Verdict v;
    int first_pos = -1, last_pos = -1;
    for (int i = 0; i < scan_count; ++i)
        if (stars[i] > 0.0) {
            if (first_pos < 0) first_pos = i;
            last_pos = i;
        }
    CHECK(v.note(first_pos > 0));
    CHECK(v.note(last_pos >= 0 && last_pos < scan_count - 1));
    bool contiguous = first_pos >= 0;
    for (int i = first_pos; i <= last_pos && contiguous; ++i) contiguous = stars[i] > 0.0;
    CHECK(v.note(contiguous));

    // Refine each zero edge of the window by bisection on the scan bracket.
    const auto bisect_edge = [&](double zero_side, double positive_side) {
        for (int it = 0; it < 9; ++it) {
            const double mid = 0.5 * (zero_side + positive_side);
            (verified_star(mid) > 0.0 ? positive_side : zero_side) = mid;
        }
        return 0.5 * (zero_side + positive_side);
    };
    const double left = first_pos > 0
                            ? bisect_edge(ratios[first_pos - 1], ratios[first_pos])
                            : ratios.front();
    const double right = last_pos >= 0 && last_pos < scan_count - 1
                             ? bisect_edge(ratios[last_pos + 1], ratios[last_pos])
                             : ratios.back();

    const double ideal = 3.0;
    const double mean_half_width = 0.5 * (right - left) / ideal;
    CHECK(v.note(std::abs(left - kLeftEdge) <= kEdgePin));
    CHECK(v.note(std::abs(right - kRightEdge) <= kEdgePin));
    CHECK(v.note(mean_half_width >= kHalfWidthLow && mean_half_width <= kHalfWidthHigh));

    // Off-center: the low-ratio side holds more entanglement at equal offsets.
    const auto at = [&](double ratio) {
        return stars[static_cast<int>(std::lround((ratio - scan_lo) / scan_step))];
    };
    CHECK(v.note(at(2.91) > at(3.09)));
    CHECK(v.note(at(2.88) > at(3.12)));

    announce(6, "verified-entanglement ratio window is a few percent wide and lopsided",
             v.ok,
             "window [" + fmt(left, 6) + ", " + fmt(right, 6) + "], mean half-width " +
                 fmt(100.0 * mean_half_width, 3) + "% (accepted 3..7%); value at ratio "
                 "2.91 " + fmt(at(2.91), 4) + " > " + fmt(at(3.09), 4) + " at 3.09");
}

TEST_CASE("criterion 07 mismatch response has unit linear and -2 chi^4 quadratic coefficients") {
    constexpr double kCoeffTol = 0.15;  // measured 0.975 and 0.956 of the targets

    SystemParams params;
    params.n_th1 = 1e3;
    params.n_th2 = 1e3 / 3.0;
    params.chi1 = 2.0;

    const int count = 9;  // epsilon from -0.02 to 0.02
    Eigen::MatrixXd vandermonde(count, 3);
    Eigen::VectorXd response(count);
    for (int i = 0; i < count; ++i) {
        const double eps = -0.02 + 0.005 * i;
        params.chi2 = params.chi1 * (1.0 + eps);
        const ProtocolReport report =
            run_entangle(params, make_entangle_schedule(params, 0, 0)).second;
        vandermonde.row(i) << 1.0, eps, eps * eps;
        // Natural-log units: the leading linear response then has unit slope.
        response(i) = report.e_n_ent * std::numbers::ln2;
    }
    const Eigen::Vector3d coeffs = vandermonde.colPivHouseholderQr().solve(response);

    const double quadratic_target = -2.0 * std::pow(params.chi1, 4);
    Verdict v;
    CHECK(v.note(std::abs(coeffs(1) - 1.0) <= kCoeffTol));
    CHECK(v.note(std::abs(coeffs(2) / quadratic_target - 1.0) <= kCoeffTol));
    announce(7, "mismatch response has unit linear and -2 chi^4 quadratic coefficients",
             v.ok,
             "quadratic fit over epsilon in [-0.02, 0.02]: linear " + fmt(coeffs(1), 5) +
                 " (target 1 +- 0.15), quadratic " + fmt(coeffs(2), 5) + " (target " +
                 fmt(quadratic_target, 4) + " +- 15%)");
}

TEST_CASE("criterion 08 single-pulse entanglement survives up to n = 4 chi^2") {
    // Measured crossings sit on the prediction to machine precision.
    constexpr double kRelTol = 0.005;

    Verdict v;
    std::ostringstream details;
    for (const double chi : {1.0, 2.0, 5.0}) {
        const double target = 4.0 * chi * chi;
        // Separability indicator of the conditioned state: its smallest
        // partial-transpose eigenvalue passes 1 where entanglement dies.
        const auto separability_gap = [&](double n_total) {
            SystemParams params;
            params.q1 = params.q2 = 1e300;
            params.chi1 = params.chi2 = chi;
            params.n_th1 = n_total - 0.5;
            params.n_th2 = std::max(0.0, n_total / 3.0 - 0.5);
            return single_pulse_entanglement(params).nu_idealized - 1.0;
        };

        double lo = 0.3 * target, hi = 3.0 * target;
        CHECK(v.note(separability_gap(lo) < 0.0));
        CHECK(v.note(separability_gap(hi) > 0.0));
        for (int it = 0; it < 60; ++it) {
            const double mid = 0.5 * (lo + hi);
            (separability_gap(mid) < 0.0 ? lo : hi) = mid;
        }
        const double crossing = 0.5 * (lo + hi);
        CHECK(v.note(std::abs(crossing / target - 1.0) <= kRelTol));
        details << " chi=" << fmt(chi, 3) << ": " << fmt(crossing, 8) << " vs "
                << fmt(target, 8) << ";";
    }
    announce(8, "single-pulse entanglement survives up to n = 4 chi^2", v.ok,
             "threshold occupation by bisection, tolerance 0.5%;" + details.str());
}

TEST_CASE("criterion 09 randomized property suite holds across channels") {
    constexpr int kCases = 10000;
    constexpr double kOutcomeTol = 1e-12;    // covariance across outcome policies
    constexpr double kSemigroupTol = 1e-10;  // split vs joint thermal contact
    constexpr double kNegativityTol = 1e-9;  // local symplectic invariance
    constexpr double kDetSlack = 1e-9;       // relative, conditioning shrinks volume

    std::mt19937_64 rng(424243ULL);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto log_uniform = [&](double lo, double hi) {
        return std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * unit(rng));
    };
    const auto rotation2 = [](double a) {
        Eigen::Matrix2d m;
        m << std::cos(a), std::sin(a), -std::sin(a), std::cos(a);
        return m;
    };

    int bona_fide_failures = 0;
    int det_failures = 0;
    int outcome_failures = 0;
    int semigroup_failures = 0;
    int negativity_failures = 0;
    double worst_outcome = 0.0, worst_semigroup = 0.0, worst_negativity = 0.0;
    double min_nu = std::numeric_limits<double>::infinity();
    const auto check_bona_fide = [&](const GaussianState& state) {
        if (!is_bona_fide(state)) ++bona_fide_failures;
        min_nu = std::min(min_nu, symplectic_eigenvalues(state.cov)[0]);
    };

    for (int c = 0; c < kCases; ++c) {
        SystemParams params;
        params.omega2 = 1.0 + 8.0 * unit(rng);
        params.q1 = log_uniform(1e2, 1e8);
        params.q2 = log_uniform(1e2, 1e8);
        params.n_th1 = log_uniform(0.5, 1e4) - 0.5;  // totals span vacuum to the
        params.n_th2 = log_uniform(0.5, 1e4) - 0.5;  // hottest studied occupation
        params.chi1 = 5.0 * unit(rng);
        params.chi2 = 5.0 * unit(rng);

        // A random protocol stage: pulse, thermal contact, second pulse.
        GaussianState state = thermal_state(params.n1(), params.n2());
        state = measure_position(state, params,
                                 {0.0, params.chi1, params.chi2,
                                  OutcomePolicy::sampled(rng())})
                    .first;
        check_bona_fide(state);
        state = decohere(state, 2.0 * kPi * unit(rng), params);
        check_bona_fide(state);

        const double t2 = 2.0 * kPi * unit(rng);
        const PulseEvent pulse{t2, params.chi1, params.chi2, OutcomePolicy::fixed(0.0)};
        const double det_before = state.cov.determinant();
        const GaussianState conditioned = measure_position(state, params, pulse).first;
        check_bona_fide(conditioned);
        if (conditioned.cov.determinant() > det_before * (1.0 + kDetSlack)) ++det_failures;

        // The covariance update must ignore how the outcome is chosen.
        for (const OutcomePolicy& policy :
             {OutcomePolicy::fixed(5.0), OutcomePolicy::sampled(rng()),
              OutcomePolicy::marginalize()}) {
            const PulseEvent variant{t2, params.chi1, params.chi2, policy};
            const GaussianState other = measure_position(state, params, variant).first;
            worst_outcome = std::max(
                worst_outcome, (other.cov - conditioned.cov).cwiseAbs().maxCoeff());
        }
        if (worst_outcome > kOutcomeTol) ++outcome_failures;

        // Two short thermal contacts equal one long one.
        const double ta = kPi * unit(rng), tb = kPi * unit(rng);
        const GaussianState split = decohere(decohere(conditioned, ta, params), tb, params);
        const GaussianState joint = decohere(conditioned, ta + tb, params);
        const double scale = std::max(1.0, joint.cov.cwiseAbs().maxCoeff());
        const double semigroup_err =
            std::max((split.cov - joint.cov).cwiseAbs().maxCoeff(),
                     (split.mean - joint.mean).cwiseAbs().maxCoeff()) /
            scale;
        worst_semigroup = std::max(worst_semigroup, semigroup_err);
        if (semigroup_err > kSemigroupTol) ++semigroup_failures;

        // Entanglement cannot change under independent per-mode symplectics.
        Eigen::Matrix4d local = Eigen::Matrix4d::Zero();
        for (int mode = 0; mode < 2; ++mode) {
            const double r = -1.0 + 2.0 * unit(rng);
            const Eigen::Vector2d squeeze(std::exp(r), std::exp(-r));
            local.block<2, 2>(2 * mode, 2 * mode) = rotation2(2.0 * kPi * unit(rng)) *
                                                    squeeze.asDiagonal() *
                                                    rotation2(2.0 * kPi * unit(rng));
        }
        const GaussianState transformed =
            change_basis(conditioned, BasisMap{local, BasisLabel::canonical});
        check_bona_fide(transformed);
        const double negativity_err =
            std::abs(log_negativity(transformed) - log_negativity(conditioned));
        worst_negativity = std::max(worst_negativity, negativity_err);
        if (negativity_err > kNegativityTol) ++negativity_failures;
    }

    Verdict v;
    CHECK(v.note(bona_fide_failures == 0));
    CHECK(v.note(det_failures == 0));
    CHECK(v.note(outcome_failures == 0));
    CHECK(v.note(semigroup_failures == 0));
    CHECK(v.note(negativity_failures == 0));
    announce(9, "randomized property suite holds across channels", v.ok,
             "10000 cases; violations: " + std::to_string(bona_fide_failures) +
                 " bona-fide, " + std::to_string(det_failures) + " determinant, " +
                 std::to_string(outcome_failures) + " outcome, " +
                 std::to_string(semigroup_failures) + " semigroup, " +
                 std::to_string(negativity_failures) +
                 " negativity; worst outcome-policy spread " + fmt(worst_outcome, 3) +
                 ", semigroup deviation " + fmt(worst_semigroup, 3) +
                 ", negativity shift " + fmt(worst_negativity, 3) +
                 ", smallest symplectic eigenvalue " + fmt(min_nu, 6));
}

TEST_CASE("criterion 10 outputs are byte-identical across worker counts") {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "pomsim_acceptance_reproducibility";
    fs::remove_all(base);

    RunConfig config;
    config.command = "sweep";
    config.sweep_name = "timing";
    config.tau_count = 80;
    config.ratio_count = 80;
    config.seed = 424242;

    RunConfig one = config;
    one.workers = 1;
    one.out_dir = (base / "one").string();
    RunConfig seven = config;
    seven.workers = 7;
    seven.out_dir = (base / "seven").string();

    Verdict v;
    CHECK(v.note(run(one) == 0));
    CHECK(v.note(run(seven) == 0));

    const auto slurp = [](const fs::path& path) {
        std::ifstream in(path, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    const std::string grid_one = slurp(base / "one" / "grid.csv");
    const std::string grid_seven = slurp(base / "seven" / "grid.csv");
    CHECK(v.note(!grid_one.empty()));
    CHECK(v.note(grid_one == grid_seven));

    nlohmann::json manifest_one = nlohmann::json::parse(slurp(base / "one" / "report.json"));
    nlohmann::json manifest_seven =
        nlohmann::json::parse(slurp(base / "seven" / "report.json"));
    CHECK(v.note(manifest_one.contains("timestamp") && manifest_seven.contains("timestamp")));
    manifest_one.erase("timestamp");
    manifest_seven.erase("timestamp");
    CHECK(v.note(manifest_one.dump() == manifest_seven.dump()));

    if (v.ok) fs::remove_all(base);  // keep the artifacts when something differs
    announce(10, "outputs are byte-identical across worker counts", v.ok,
             "timing sweep 80x80 with 1 vs 7 workers: grid.csv " +
                 std::to_string(grid_one.size()) +
                 " bytes identical; manifests identical outside the timestamp block");
}
