#include <functional>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pomsim/config.hpp"
#include "pomsim/run.hpp"

namespace {

using Applier = std::function<void(pomsim::RunConfig&)>;

// Register a flag that maps straight onto a config key. The raw string is
// handed to the config layer so the CLI and config files share one parser
// and one set of error messages. Overrides apply only when the flag was
// actually given, on top of whatever --config loaded.
void add_key_option(CLI::App& app, std::vector<Applier>& appliers, const std::string& flag,
                    const std::string& key, const std::string& desc) {
    auto holder = std::make_shared<std::string>();
    CLI::Option* opt = app.add_option(flag, *holder, desc);
    appliers.push_back([opt, holder, key](pomsim::RunConfig& c) {
        if (opt->count() > 0) pomsim::apply_key_value(c, key, *holder);
    });
}

void add_key_flag(CLI::App& app, std::vector<Applier>& appliers, const std::string& flag,
                  const std::string& key, const std::string& desc) {
    CLI::Option* opt = app.add_flag(flag, desc);
    appliers.push_back([opt, key](pomsim::RunConfig& c) {
        if (opt->count() > 0) pomsim::apply_key_value(c, key, "true");
    });
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Gaussian simulator for pulsed optomechanical entanglement of two "
                 "mechanical modes: two-pulse generation, three-branch verification, "
                 "parameter sweeps and phase-space snapshots."};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    app.add_option("--config", config_path, "Key-value config file; flags override its entries");

    std::vector<Applier> appliers;

    // Output and execution control.
    add_key_option(app, appliers, "--out", "out", "Output directory (default: out)");
    add_key_option(app, appliers, "--seed", "seed", "Seed for sampled measurement outcomes");
    add_key_option(app, appliers, "--workers", "workers",
                   "Worker threads for sweeps (0 = machine parallelism)");
    add_key_option(app, appliers, "--format", "format",
                   "Output format: csv (default), json (embed rows), svg (add heatmap)");

    // Physical parameters (defaults: ratio 3, chi 2, Q 1e6, n_th 1e4 and 1e4/3).
    std::shared_ptr<std::string> chi_both = std::make_shared<std::string>();
    CLI::Option* chi_opt =
        app.add_option("--chi", *chi_both, "Measurement strength for both modes (default 2)");
    appliers.push_back([chi_opt, chi_both](pomsim::RunConfig& c) {
        if (chi_opt->count() > 0) {
            pomsim::apply_key_value(c, "chi1", *chi_both);
            pomsim::apply_key_value(c, "chi2", *chi_both);
        }
    });
    add_key_option(app, appliers, "--chi1", "chi1", "Measurement strength, mode 1");
    add_key_option(app, appliers, "--chi2", "chi2", "Measurement strength, mode 2");

    std::shared_ptr<std::string> q_both = std::make_shared<std::string>();
    CLI::Option* q_opt =
        app.add_option("--q", *q_both, "Quality factor for both modes (default 1e6)");
    appliers.push_back([q_opt, q_both](pomsim::RunConfig& c) {
        if (q_opt->count() > 0) {
            pomsim::apply_key_value(c, "q1", *q_both);
            pomsim::apply_key_value(c, "q2", *q_both);
        }
    });
    add_key_option(app, appliers, "--q1", "q1", "Quality factor, mode 1");
    add_key_option(app, appliers, "--q2", "q2", "Quality factor, mode 2");
    add_key_option(app, appliers, "--n-th1", "n_th1", "Thermal occupation, mode 1 (default 1e4)");
    add_key_option(app, appliers, "--n-th2", "n_th2", "Thermal occupation, mode 2 (default 1e4/3)");
    add_key_option(app, appliers, "--omega1", "omega1", "Frequency of mode 1 (default 1)");
    add_key_option(app, appliers, "--omega2", "omega2", "Frequency of mode 2 (default 3)");

    std::shared_ptr<std::string> ratio = std::make_shared<std::string>();
    CLI::Option* ratio_opt = app.add_option(
        "--ratio", *ratio, "Frequency ratio omega2/omega1; sets omega2 (default 3)");
    appliers.push_back([ratio_opt, ratio](pomsim::RunConfig& c) {
        if (ratio_opt->count() > 0) {
            // Applied after --omega1 (registration order) so the product is
            // taken with the overridden base frequency.
            const double r = std::stod(*ratio);
            c.params.omega2 = r * c.params.omega1;
        }
    });

    // Schedule control.
    add_key_option(app, appliers, "--k", "k", "Delay family index k (default 0)");
    add_key_option(app, appliers, "--l", "l", "Delay family index l (default 0)");
    add_key_option(app, appliers, "--tau", "tau",
                   "Two-pulse delay; 0 derives (2k+1)*pi/(2*omega1)");
    add_key_option(app, appliers, "--d-plus", "d_plus",
                   "Verification delay, X+ branch; 0 derives pi/(2*omega1)");
    add_key_option(app, appliers, "--d-minus", "d_minus",
                   "Verification delay, P- branch; 0 derives pi/omega1");
    add_key_option(app, appliers, "--d-cross", "d_cross",
                   "Verification delay, mixed branch; 0 derives pi/(4*omega1)");
    add_key_flag(app, appliers, "--include-readout-imprecision", "include_readout_imprecision",
                 "Add the homodyne shot-noise floor to the reconstructed variances");

    // Sweep axes.
    add_key_option(app, appliers, "--q-min", "q_min", "Q axis start (default 1e3)");
    add_key_option(app, appliers, "--q-max", "q_max", "Q axis end (default 1e8)");
    add_key_option(app, appliers, "--q-count", "q_count", "Q axis points (default 200)");
    add_key_option(app, appliers, "--q-scale", "q_scale", "Q axis scale: log|linear");
    add_key_option(app, appliers, "--chi-list", "chi_list",
                   "Comma-separated strengths for curve families (default 1,2,3,4,5)");
    add_key_option(app, appliers, "--tau-min", "tau_min", "Delay axis start (default 0)");
    add_key_option(app, appliers, "--tau-max", "tau_max", "Delay axis end (default 3*pi)");
    add_key_option(app, appliers, "--tau-count", "tau_count", "Delay axis points (default 200)");
    add_key_option(app, appliers, "--ratio-min", "ratio_min", "Ratio axis start (default 1)");
    add_key_option(app, appliers, "--ratio-max", "ratio_max", "Ratio axis end (default 9)");
    add_key_option(app, appliers, "--ratio-count", "ratio_count",
                   "Ratio axis points (default 200)");
    add_key_option(app, appliers, "--eps-min", "eps_min",
                   "Coupling-mismatch axis start (default -0.05)");
    add_key_option(app, appliers, "--eps-max", "eps_max",
                   "Coupling-mismatch axis end (default 0.05)");
    add_key_option(app, appliers, "--eps-count", "eps_count",
                   "Coupling-mismatch axis points (default 81)");
    add_key_option(app, appliers, "--mismatch-min", "mismatch_min",
                   "chi2/chi1 axis start (default 0.25)");
    add_key_option(app, appliers, "--mismatch-max", "mismatch_max",
                   "chi2/chi1 axis end (default 2)");
    add_key_option(app, appliers, "--mismatch-count", "mismatch_count",
                   "chi2/chi1 axis points (default 101)");

    // Optimizer control.
    add_key_option(app, appliers, "--opt-method", "opt_method",
                   "Delay optimizer: simplex (default) | grid_refine");
    add_key_option(app, appliers, "--opt-tolerance", "opt_tolerance",
                   "Optimizer objective tolerance (default 1e-6)");
    add_key_option(app, appliers, "--opt-max-evals", "opt_max_evals",
                   "Optimizer evaluation budget (default 2000)");
    add_key_option(app, appliers, "--opt-coarse-points", "opt_coarse_points",
                   "Coarse-scan resolution before refinement (default 64)");
    add_key_option(app, appliers, "--opt-bound-fraction", "opt_bound_fraction",
                   "Fractional box around default verification delays (default 0.035)");

    // Phase-space snapshot control.
    add_key_option(app, appliers, "--stage", "stage",
                   "Snapshot stage: 0 thermal, 1 after first pulse, 2 after sequence");
    add_key_option(app, appliers, "--pair", "pair",
                   "Quadrature pair, e.g. X+,P+ or X1,P2 (default X+,P+)");
    add_key_option(app, appliers, "--mean-xplus", "mean_xplus",
                   "Displace the collective position mean before plotting");
    add_key_option(app, appliers, "--wigner-half-width", "wigner_half_width",
                   "Window half-width; 0 = auto (6 sigma)");
    add_key_option(app, appliers, "--wigner-count", "wigner_count",
                   "Points per window axis (default 201)");

    CLI::App* entangle = app.add_subcommand("entangle", "Run the two-pulse sequence");
    CLI::App* verify = app.add_subcommand("verify", "Entangle, then three-branch verification");
    CLI::App* single_pulse =
        app.add_subcommand("single-pulse", "Conditioned state after a single pulse");
    CLI::App* sweep = app.add_subcommand("sweep", "Grid sweeps and delay optimization");
    std::string sweep_name;
    sweep->add_option("name", sweep_name, "en-vs-q | timing | verify-opt | coupling | max-en")
        ->required();
    CLI::App* wigner = app.add_subcommand("wigner", "Phase-space density snapshot");
    CLI::App* criteria = app.add_subcommand("criteria", "Evaluate the entanglement criteria");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    pomsim::RunConfig config;
    try {
        if (!config_path.empty()) config = pomsim::parse_config_file(config_path);
        for (const Applier& apply : appliers) apply(config);
        if (entangle->parsed()) config.command = "entangle";
        if (verify->parsed()) config.command = "verify";
        if (single_pulse->parsed()) config.command = "single-pulse";
        if (criteria->parsed()) config.command = "criteria";
        if (wigner->parsed()) config.command = "wigner";
        if (sweep->parsed()) {
            config.command = "sweep";
            config.sweep_name = sweep_name;
        }
        config.validate();
    } catch (const std::exception& e) {
        std::cerr << nlohmann::json{{"error", e.what()}}.dump() << "\n";
        return 1;
    }

    return pomsim::run(config);
}
