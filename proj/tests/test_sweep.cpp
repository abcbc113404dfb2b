#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "pomsim/protocol.hpp"
#include "pomsim/sweep.hpp"

using namespace pomsim;

namespace {

constexpr double kPi = std::numbers::pi;

bool rows_identical(const SweepGrid& a, const SweepGrid& b) {
    if (a.rows.size() != b.rows.size()) return false;
    for (std::size_t i = 0; i < a.rows.size(); ++i) {
        if (a.rows[i].size() != b.rows[i].size()) return false;
        for (std::size_t j = 0; j < a.rows[i].size(); ++j)
            if (a.rows[i][j] != b.rows[i][j]) return false;  // bitwise
    }
    return true;
}

}  // namespace

TEST_CASE("axis values cover the range inclusively on both scales") {
    Axis lin{"x", 0.0, 1.0, 5, Axis::Scale::linear};
    const auto lv = lin.values();
    CHECK(lv.front() == 0.0);
    CHECK(lv.back() == 1.0);
    CHECK(lv[2] == doctest::Approx(0.5));

    Axis lg{"q", 1e2, 1e6, 5, Axis::Scale::log};
    const auto gv = lg.values();
    CHECK(gv.front() == doctest::Approx(1e2).epsilon(1e-12));
    CHECK(gv.back() == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(gv[2] == doctest::Approx(1e4).epsilon(1e-12));

    CHECK_THROWS_AS((Axis{"x", 1.0, 0.0, 5, Axis::Scale::linear}.values()),
                    std::invalid_argument);
    CHECK_THROWS_AS((Axis{"x", 0.0, 1.0, 1, Axis::Scale::linear}.values()),
                    std::invalid_argument);
    CHECK_THROWS_AS((Axis{"q", 0.0, 1e6, 4, Axis::Scale::log}.values()),
                    std::invalid_argument);
}

TEST_CASE("negativity-versus-quality sweep hits the reference point") {
    Axis q{"q", 1e6, 1e7, 2, Axis::Scale::log};
    const SweepGrid grid = sweep_en_vs_q({2.0}, q, SystemParams{}, 1);
    REQUIRE(grid.rows.size() == 2);
    // Row 0: chi = 2, Q = 1e6.
    CHECK(grid.rows[0][0] == 2.0);
    CHECK(grid.rows[0][1] == doctest::Approx(1e6).epsilon(1e-12));
    CHECK(grid.rows[0][2] == doctest::Approx(2.838274).epsilon(1e-5));
    CHECK(grid.rows[0][3] == doctest::Approx(2.412453).epsilon(1e-5));

    // At chi = 1/sqrt2 the threshold is exactly marginal: no negativity.
    const SweepGrid none = sweep_en_vs_q({1.0 / std::sqrt(2.0)}, q, SystemParams{}, 1);
    CHECK(none.rows[0][2] == 0.0);
    CHECK(none.rows[0][3] == 0.0);
}

TEST_CASE("timing heatmap peaks at the quarter-period delay for ratio three") {
    Axis tau{"tau", 0.0, 3 * kPi, 25, Axis::Scale::linear};
    Axis ratio{"ratio", 1.0, 9.0, 9, Axis::Scale::linear};
    const SweepGrid grid = sweep_timing_heatmap(tau, ratio, SystemParams{}, 0);
    REQUIRE(grid.rows.size() == 25 * 9);

    auto value_at = [&](int ti, int ri) { return grid.rows[ti * 9 + ri][2]; };
    // tau index 4 is pi/2 exactly on this grid; ratio index 2 is 3.
    CHECK(grid.rows[4 * 9 + 2][0] == doctest::Approx(kPi / 2).epsilon(1e-12));
    CHECK(grid.rows[4 * 9 + 2][1] == 3.0);
    CHECK(value_at(4, 2) == doctest::Approx(2.838274).epsilon(1e-5));

    // A half-period delay reads the same quadrature twice: much weaker.
    CHECK(value_at(8, 2) < value_at(4, 2) - 1.0);
}

TEST_CASE("delay optimizer finds the fundamental lobe") {
    const SystemParams params;
    const DelayOptimum best = optimize_entangle_delay(3.0, params);
    CHECK(std::abs(best.tau_star - kPi / 2) <= 0.015);
    CHECK(best.e_n_star == doctest::Approx(2.838274).epsilon(2e-3));

    // The optimum dominates a brute-force bracket scan.
    const double lo = 0.55 * kPi, hi = 1.55 * kPi;
    for (int i = 0; i <= 40; ++i) {
        const double tau = lo + (hi - lo) * i / 40.0;
        EntangleSchedule schedule;
        schedule.tau = tau;
        const double e = run_entangle(params, schedule).second.e_n_ent;
        CHECK(best.e_n_star >= e - 1e-9);
    }
}

TEST_CASE("delay optimizer methods agree and degrade gracefully") {
    const SystemParams params;
    OptimizerConfig simplex_cfg;
    simplex_cfg.method = OptimizerConfig::Method::simplex;
    OptimizerConfig grid_cfg;
    grid_cfg.method = OptimizerConfig::Method::grid_refine;

    const DelayOptimum a = optimize_entangle_delay(3.05, params, simplex_cfg);
    const DelayOptimum b = optimize_entangle_delay(3.05, params, grid_cfg);
    CHECK(a.tau_star == doctest::Approx(b.tau_star).epsilon(1e-6));
    CHECK(a.e_n_star == doctest::Approx(b.e_n_star).epsilon(1e-9));

    SystemParams idle;
    idle.chi1 = 0.0;
    idle.chi2 = 0.0;
    const DelayOptimum none = optimize_entangle_delay(3.0, idle);
    CHECK(none.e_n_star == 0.0);
}

TEST_CASE("verification optimizer recovers the default delays at ratio three") {
    const SystemParams params;
    const VerifyOptimum best = optimize_verification(3.0, params, OptimizerConfig{});

    CHECK(best.e_n_ver_star == doctest::Approx(2.412450).epsilon(1e-4));
    CHECK(best.e_n_ent_star == doctest::Approx(2.838274).epsilon(2e-3));

    // Delays stay inside the fractional box around the defaults.
    const VerifySchedule d0 = default_verify_schedule(params);
    CHECK(std::abs(best.delays.d_plus - d0.d_plus) <= 0.035 * d0.d_plus + 1e-9);
    CHECK(std::abs(best.delays.d_minus - d0.d_minus) <= 0.035 * d0.d_minus + 1e-9);
    CHECK(std::abs(best.delays.d_cross - d0.d_cross) <= 0.035 * d0.d_cross + 1e-9);

    // Verification never reports more than the entangled state holds.
    CHECK(best.e_n_ver_star <= best.e_n_ent_star + 1e-9);
}

TEST_CASE("sweeps are deterministic and worker-count independent") {
    Axis q{"q", 1e5, 1e7, 6, Axis::Scale::log};
    const SweepGrid serial = sweep_en_vs_q({1.0, 2.0}, q, SystemParams{}, 1);
    const SweepGrid threaded = sweep_en_vs_q({1.0, 2.0}, q, SystemParams{}, 3);
    const SweepGrid again = sweep_en_vs_q({1.0, 2.0}, q, SystemParams{}, 3);
    CHECK(rows_identical(serial, threaded));
    CHECK(rows_identical(threaded, again));

    Axis tau{"tau", 0.5, 4.0, 8, Axis::Scale::linear};
    Axis ratio{"ratio", 2.0, 4.0, 3, Axis::Scale::linear};
    const SweepGrid t1 = sweep_timing_heatmap(tau, ratio, SystemParams{}, 1);
    const SweepGrid t4 = sweep_timing_heatmap(tau, ratio, SystemParams{}, 4);
    CHECK(rows_identical(t1, t4));
}

TEST_CASE("coupling-mismatch sweep reduces to the matched point at zero epsilon") {
    Axis eps{"epsilon", -0.05, 0.05, 5, Axis::Scale::linear};
    const SweepGrid grid = sweep_coupling_mismatch(eps, {2.0}, SystemParams{}, 1);
    REQUIRE(grid.rows.size() == 5);

    // Middle row is epsilon = 0: equal couplings.
    CHECK(grid.rows[2][1] == doctest::Approx(0.0));
    CHECK(grid.rows[2][3] == doctest::Approx(2.412453).epsilon(1e-5));

    // Mismatch can only lower the verified negativity.
    CHECK(grid.rows[0][3] < grid.rows[2][3]);
    CHECK(grid.rows[4][3] < grid.rows[2][3]);
}

TEST_CASE("ratio-mismatch heatmap carries the optimized delay per point") {
    Axis ratio{"ratio", 2.9, 3.0, 2, Axis::Scale::linear};
    Axis mismatch{"mismatch", 0.5, 1.0, 2, Axis::Scale::linear};
    const SweepGrid grid =
        sweep_max_en_heatmap(ratio, mismatch, SystemParams{}, OptimizerConfig{}, 0);
    REQUIRE(grid.rows.size() == 4);

    // Row (ratio = 3, mismatch = 1): the reference working point.
    const auto& matched = grid.rows[3];
    CHECK(matched[0] == 3.0);
    CHECK(matched[1] == 1.0);
    CHECK(std::abs(matched[2] - kPi / 2) <= 0.015);
    CHECK(matched[3] == doctest::Approx(2.838274).epsilon(2e-3));

    // Halving one coupling still entangles, but less.
    const auto& lopsided = grid.rows[2];
    CHECK(lopsided[3] > 0.0);
    CHECK(lopsided[3] < matched[3]);
}
