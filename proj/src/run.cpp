#include "pomsim/run.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <stdexcept>
#include <thread>

#include <nlohmann/json.hpp>

#include "pomsim/dynamics.hpp"
#include "pomsim/gaussian_state.hpp"
#include "pomsim/measurement.hpp"
#include "pomsim/output.hpp"
#include "pomsim/protocol.hpp"
#include "pomsim/sweep.hpp"

namespace pomsim {

namespace {

std::string fmt6(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

std::string out_path(const RunConfig& config, const std::string& name) {
    return (std::filesystem::path(config.out_dir) / name).string();
}

// Config echo for the manifest. Worker count and output directory are
// normalized away: neither affects any payload byte, and reruns that differ
// only in those must compare byte-identical outside the timestamp object.
// The actual values are recorded in the timestamp (provenance) object.
std::string manifest_config(const RunConfig& config) {
    RunConfig echo = config;
    echo.workers = 0;
    echo.out_dir = RunConfig{}.out_dir;
    return serialize_config(echo);
}

int resolved_workers(const RunConfig& config) {
    if (config.workers > 0) return config.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

void print_params(const SystemParams& p) {
    std::cout << "  params: omega2/omega1 = " << fmt6(p.omega2 / p.omega1)
              << ", chi = (" << fmt6(p.chi1) << ", " << fmt6(p.chi2) << ")"
              << ", Q = (" << fmt6(p.q1) << ", " << fmt6(p.q2) << ")"
              << ", n_th = (" << fmt6(p.n_th1) << ", " << fmt6(p.n_th2) << ")\n";
}

void print_criteria(const GenerationCriteria& c) {
    auto line = [](const char* what, bool ok, double margin) {
        std::cout << "  " << what << ": " << (ok ? "PASSED" : "FAILED")
                  << " (margin " << fmt6(margin) << ")\n";
    };
    line("measurement strength chi_eff > 1/sqrt(2)", c.chi_above_threshold, c.chi_margin);
    line("quality factor above minimum           ", c.q_above_minimum, c.q_margin);
    line("decoherence load D < 1                 ", c.decoherence_small, c.decoherence_margin);
    std::cout << "  overall: " << (c.all() ? "PASSED" : "FAILED") << "\n";
}

nlohmann::json report_json_with_header(const RunConfig& config, const ProtocolReport& report) {
    nlohmann::json j = report_to_json(report);
    j["version"] = kVersion;
    j["command"] = config.command;
    return j;
}

int cmd_entangle(const RunConfig& config) {
    const EntangleSchedule schedule = config.entangle_schedule();
    const auto [state, report] = run_entangle(config.params, schedule);
    write_json_atomic(out_path(config, "report.json"), report_json_with_header(config, report));

    std::cout << "entangle: two-pulse sequence, k=" << schedule.k << " l=" << schedule.l
              << " tau=" << fmt6(schedule.tau) << "\n";
    print_params(config.params);
    std::cout << "  collective variances (X+,P+,X-,P-): ";
    for (int i = 0; i < 4; ++i)
        std::cout << (i ? ", " : "") << fmt6(report.collective_variances(i));
    std::cout << "\n  E_N(entangle) = " << fmt6(report.e_n_ent) << "\n";
    print_criteria(report.criteria);
    std::cout << "  wrote " << out_path(config, "report.json") << "\n";
    return 0;
}

int cmd_verify(const RunConfig& config) {
    const EntangleSchedule schedule = config.entangle_schedule();
    const auto [state, ent_report] = run_entangle(config.params, schedule);
    const ProtocolReport report =
        run_verify(state, config.params, schedule, config.verify_schedule(),
                   config.include_readout_imprecision);
    write_json_atomic(out_path(config, "report.json"), report_json_with_header(config, report));

    const VerifySchedule d = report.verify;
    std::cout << "verify: three-branch readout after the two-pulse sequence\n";
    print_params(config.params);
    std::cout << "  delays: d_plus=" << fmt6(d.d_plus) << " d_minus=" << fmt6(d.d_minus)
              << " d_cross=" << fmt6(d.d_cross)
              << (config.include_readout_imprecision ? "  (readout imprecision included)" : "")
              << "\n";
    std::cout << "  reconstructed variances (X+,P+,X-,P-): ";
    for (int i = 0; i < 4; ++i)
        std::cout << (i ? ", " : "") << fmt6(report.sigma_ver(i, i));
    std::cout << "\n  E_N(entangle) = " << fmt6(report.e_n_ent)
              << ", E_N(verify) = " << fmt6(report.e_n_ver) << "\n";
    std::cout << "  wrote " << out_path(config, "report.json") << "\n";
    return 0;
}

int cmd_single_pulse(const RunConfig& config) {
    const SinglePulseResult r = single_pulse_entanglement(config.params);
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = config.command;
    j["params"] = {{"omega1", config.params.omega1}, {"omega2", config.params.omega2},
                   {"q1", config.params.q1},         {"q2", config.params.q2},
                   {"n_th1", config.params.n_th1},   {"n_th2", config.params.n_th2},
                   {"chi1", config.params.chi1},     {"chi2", config.params.chi2}};
    auto mat = [](const Eigen::Matrix4d& m) {
        nlohmann::json rows = nlohmann::json::array();
        for (int a = 0; a < 4; ++a) {
            nlohmann::json row = nlohmann::json::array();
            for (int b = 0; b < 4; ++b) row.push_back(m(a, b));
            rows.push_back(row);
        }
        return rows;
    };
    j["sigma_exact"] = mat(r.sigma_exact);
    j["sigma_idealized"] = mat(r.sigma_idealized);
    j["e_n_exact"] = r.e_n_exact;
    j["e_n_idealized"] = r.e_n_idealized;
    j["nu_idealized"] = r.nu_idealized;
    j["below_threshold"] = r.below_threshold;
    write_json_atomic(out_path(config, "report.json"), j);

    const double chi2 = config.params.chi_eff() * config.params.chi_eff();
    std::cout << "single-pulse: conditioned state after one position measurement\n";
    print_params(config.params);
    std::cout << "  E_N(exact) = " << fmt6(r.e_n_exact)
              << ", E_N(idealized) = " << fmt6(r.e_n_idealized) << "\n";
    std::cout << "  smallest PT symplectic eigenvalue (idealized) = " << fmt6(r.nu_idealized)
              << "\n";
    std::cout << "  occupation " << fmt6(config.params.n1()) << " vs threshold 4*chi^2 = "
              << fmt6(4.0 * chi2) << ": "
              << (r.below_threshold ? "entanglement survives" : "entanglement lost") << "\n";
    std::cout << "  wrote " << out_path(config, "report.json") << "\n";
    return 0;
}

int cmd_criteria(const RunConfig& config) {
    const GenerationCriteria c = generation_criteria(config.params);
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = config.command;
    j["params"] = {{"omega1", config.params.omega1}, {"omega2", config.params.omega2},
                   {"q1", config.params.q1},         {"q2", config.params.q2},
                   {"n_th1", config.params.n_th1},   {"n_th2", config.params.n_th2},
                   {"chi1", config.params.chi1},     {"chi2", config.params.chi2}};
    j["criteria"] = criteria_to_json(c);
    write_json_atomic(out_path(config, "report.json"), j);

    std::cout << "criteria: necessary conditions for two-pulse entanglement\n";
    print_params(config.params);
    print_criteria(c);
    std::cout << "  wrote " << out_path(config, "report.json") << "\n";
    return 0;
}

SweepGrid dispatch_sweep(const RunConfig& config) {
    const int workers = config.workers;
    if (config.sweep_name == "en-vs-q") {
        Axis q{"q", config.q_min, config.q_max, config.q_count,
               config.q_scale == "log" ? Axis::Scale::log : Axis::Scale::linear};
        return sweep_en_vs_q(config.chi_list, q, config.params, workers);
    }
    if (config.sweep_name == "timing") {
        Axis tau{"tau", config.tau_min, config.tau_max, config.tau_count, Axis::Scale::linear};
        Axis ratio{"ratio", config.ratio_min, config.ratio_max, config.ratio_count,
                   Axis::Scale::linear};
        return sweep_timing_heatmap(tau, ratio, config.params, workers);
    }
    if (config.sweep_name == "verify-opt") {
        Axis ratio{"ratio", config.ratio_min, config.ratio_max, config.ratio_count,
                   Axis::Scale::linear};
        return sweep_verify_opt(ratio, config.params, config.optimizer_config(), workers);
    }
    if (config.sweep_name == "coupling") {
        Axis eps{"epsilon", config.eps_min, config.eps_max, config.eps_count,
                 Axis::Scale::linear};
        return sweep_coupling_mismatch(eps, config.chi_list, config.params, workers);
    }
    if (config.sweep_name == "max-en") {
        Axis ratio{"ratio", config.ratio_min, config.ratio_max, config.ratio_count,
                   Axis::Scale::linear};
        Axis mismatch{"mismatch", config.mismatch_min, config.mismatch_max,
                      config.mismatch_count, Axis::Scale::linear};
        return sweep_max_en_heatmap(ratio, mismatch, config.params, config.optimizer_config(),
                                    workers);
    }
    throw std::invalid_argument("unknown sweep: " + config.sweep_name);
}

int cmd_sweep(const RunConfig& config,
              const std::chrono::steady_clock::time_point& started) {
    const SweepGrid grid = dispatch_sweep(config);

    std::vector<std::string> outputs = {"grid.csv", "report.json"};
    const bool want_svg = config.format == "svg" && grid.axes.size() == 2;
    if (want_svg) outputs.insert(outputs.begin() + 1, std::string("heatmap.svg"));

    write_csv_atomic(out_path(config, "grid.csv"), grid);

    if (want_svg) {
        const std::vector<double> ys = grid.axes[0].values();
        const std::vector<double> xs = grid.axes[1].values();
        std::vector<double> values;
        values.reserve(grid.rows.size());
        for (const auto& row : grid.rows) values.push_back(row.back());
        const std::string svg =
            render_heatmap_svg(xs, ys, values, grid.axes[1].name, grid.axes[0].name,
                               config.sweep_name + ": " + grid.columns.back());
        write_text_atomic(out_path(config, "heatmap.svg"), svg);
    }

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json manifest = make_manifest("sweep " + config.sweep_name,
                                            manifest_config(config), outputs,
                                            resolved_workers(config), elapsed);
    manifest["timestamp"]["out_dir"] = config.out_dir;
    nlohmann::json axes = nlohmann::json::array();
    for (const Axis& a : grid.axes)
        axes.push_back({{"name", a.name},
                        {"min", a.min},
                        {"max", a.max},
                        {"count", a.count},
                        {"scale", a.scale == Axis::Scale::log ? "log" : "linear"}});
    manifest["grid"] = {{"columns", grid.columns}, {"row_count", grid.rows.size()},
                       {"axes", axes}};
    if (config.format == "json") manifest["rows"] = grid.rows;
    write_json_atomic(out_path(config, "report.json"), manifest);

    std::cout << "sweep " << config.sweep_name << ": " << grid.rows.size() << " points, "
              << fmt6(elapsed) << " s with " << resolved_workers(config) << " worker(s)\n";
    print_params(config.params);
    std::cout << "  columns: ";
    for (std::size_t i = 0; i < grid.columns.size(); ++i)
        std::cout << (i ? ", " : "") << grid.columns[i];
    std::cout << "\n";
    for (const auto& name : outputs)
        std::cout << "  wrote " << out_path(config, name) << "\n";
    return 0;
}

// Quadrature-pair tokens for the wigner command; either both canonical
// (X1,P1,X2,P2) or both collective (X+,P+,X-,P-).
struct PairSelection {
    int qa = 0;
    int qb = 1;
    bool collective = false;
};

PairSelection parse_pair(const std::string& pair) {
    auto index_of = [](const std::string& token, bool& collective) -> int {
        if (token == "X1") return collective = false, 0;
        if (token == "P1") return collective = false, 1;
        if (token == "X2") return collective = false, 2;
        if (token == "P2") return collective = false, 3;
        if (token == "X+") return collective = true, 0;
        if (token == "P+") return collective = true, 1;
        if (token == "X-") return collective = true, 2;
        if (token == "P-") return collective = true, 3;
        throw std::invalid_argument(
            "wigner: unknown quadrature '" + token +
            "' (use X1,P1,X2,P2 or X+,P+,X-,P-)");
    };
    const std::size_t comma = pair.find(',');
    if (comma == std::string::npos)
        throw std::invalid_argument("wigner: pair must be two comma-separated quadratures");
    bool coll_a = false, coll_b = false;
    PairSelection sel;
    sel.qa = index_of(pair.substr(0, comma), coll_a);
    sel.qb = index_of(pair.substr(comma + 1), coll_b);
    if (coll_a != coll_b)
        throw std::invalid_argument("wigner: both quadratures must use the same basis family");
    if (sel.qa == sel.qb)
        throw std::invalid_argument("wigner: the two quadratures must differ");
    sel.collective = coll_a;
    return sel;
}

int cmd_wigner(const RunConfig& config,
               const std::chrono::steady_clock::time_point& started) {
    const SystemParams& p = config.params;
    GaussianState state = thermal_state(p.n1(), p.n2());
    if (config.stage >= 1) {
        const PulseEvent first{0.0, p.chi1, p.chi2, OutcomePolicy::marginalize()};
        state = measure_position(state, p, first).first;
    }
    if (config.stage == 2) {
        const EntangleSchedule schedule = config.entangle_schedule();
        state = decohere(state, schedule.tau, p);
        const PulseEvent second{schedule.tau, p.chi1, p.chi2, OutcomePolicy::marginalize()};
        state = measure_position(state, p, second).first;
    }
    if (config.mean_xplus != 0.0) {
        const Eigen::Matrix4d b = collective_basis_map(2).matrix;
        state.mean += b.transpose() * Eigen::Vector4d(config.mean_xplus, 0, 0, 0);
    }

    const PairSelection sel = parse_pair(config.pair);
    if (sel.collective) state = change_basis(state, collective_basis_map(2));

    const double ca = state.mean(sel.qa);
    const double cb = state.mean(sel.qb);
    const double sa = std::sqrt(state.cov(sel.qa, sel.qa));
    const double sb = std::sqrt(state.cov(sel.qb, sel.qb));
    // Auto windows are 6 sigma per axis; a squeezed and an anti-squeezed
    // quadrature can differ by orders of magnitude, so a shared width would
    // leave the narrow direction unresolved.
    const double half_a =
        config.wigner_half_width > 0.0 ? config.wigner_half_width : 6.0 * sa;
    const double half_b =
        config.wigner_half_width > 0.0 ? config.wigner_half_width : 6.0 * sb;

    GridSpec spec;
    spec.x_min = ca - half_a;
    spec.x_max = ca + half_a;
    spec.x_count = config.wigner_count;
    spec.y_min = cb - half_b;
    spec.y_max = cb + half_b;
    spec.y_count = config.wigner_count;
    const WignerGrid grid = wigner_marginal_grid(state, sel.qa, sel.qb, spec);

    std::string csv = "x,y,w\n";
    for (int r = 0; r < spec.y_count; ++r)
        for (int c = 0; c < spec.x_count; ++c)
            csv += fmt_g17(grid.x[static_cast<std::size_t>(c)]) + "," +
                   fmt_g17(grid.y[static_cast<std::size_t>(r)]) + "," +
                   fmt_g17(grid.values(r, c)) + "\n";
    write_text_atomic(out_path(config, "wigner.csv"), csv);

    double peak = -1.0;
    int peak_r = 0, peak_c = 0;
    for (int r = 0; r < spec.y_count; ++r)
        for (int c = 0; c < spec.x_count; ++c)
            if (grid.values(r, c) > peak) {
                peak = grid.values(r, c);
                peak_r = r;
                peak_c = c;
            }
    const double dx = (spec.x_max - spec.x_min) / (spec.x_count - 1);
    const double dy = (spec.y_max - spec.y_min) / (spec.y_count - 1);
    const double mass = grid.values.sum() * dx * dy;

    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    nlohmann::json manifest =
        make_manifest("wigner", manifest_config(config), {"wigner.csv", "report.json"},
                      resolved_workers(config), elapsed);
    manifest["timestamp"]["out_dir"] = config.out_dir;
    manifest["wigner"] = {
        {"stage", config.stage},
        {"pair", config.pair},
        {"center", {ca, cb}},
        {"sigma", {sa, sb}},
        {"peak", {{"x", grid.x[static_cast<std::size_t>(peak_c)]},
                  {"y", grid.y[static_cast<std::size_t>(peak_r)]},
                  {"value", peak}}},
        {"mass", mass},
    };
    write_json_atomic(out_path(config, "report.json"), manifest);

    std::cout << "wigner: stage " << config.stage << ", pair " << config.pair << "\n";
    print_params(p);
    std::cout << "  window: center (" << fmt6(ca) << ", " << fmt6(cb) << "), half-widths ("
              << fmt6(half_a) << ", " << fmt6(half_b) << "), " << spec.x_count << "x"
              << spec.y_count << " points\n";
    std::cout << "  peak " << fmt6(peak) << " at (" << fmt6(grid.x[static_cast<std::size_t>(peak_c)])
              << ", " << fmt6(grid.y[static_cast<std::size_t>(peak_r)]) << "), integrated mass "
              << fmt6(mass) << "\n";
    std::cout << "  wrote " << out_path(config, "wigner.csv") << "\n";
    std::cout << "  wrote " << out_path(config, "report.json") << "\n";
    return 0;
}

}  // namespace

int run(const RunConfig& config) {
    const auto started = std::chrono::steady_clock::now();
    try {
        config.validate();
        if (config.command == "entangle") return cmd_entangle(config);
        if (config.command == "verify") return cmd_verify(config);
        if (config.command == "single-pulse") return cmd_single_pulse(config);
        if (config.command == "criteria") return cmd_criteria(config);
        if (config.command == "sweep") return cmd_sweep(config, started);
        if (config.command == "wigner") return cmd_wigner(config, started);
        throw std::invalid_argument("unknown command: " + config.command);
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 2;
    }
}

}  // namespace pomsim
