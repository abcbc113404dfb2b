#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pomsim/params.hpp"
#include "pomsim/protocol.hpp"
#include "pomsim/sweep.hpp"

namespace pomsim {

// Fully-resolved run description: command, physical parameters, schedules,
// sweep axes, optimizer controls and output settings. Serializes to a flat
// key = value document; parse(serialize(c)) == c.
struct RunConfig {
    std::string command = "entangle";   // entangle|verify|single-pulse|sweep|wigner|criteria
    std::string sweep_name = "en-vs-q"; // en-vs-q|timing|verify-opt|coupling|max-en

    SystemParams params;

    // Entangling schedule; tau <= 0 means "derive from (k,l) and omega1".
    int k = 0;
    int l = 0;
    double tau = 0.0;

    // Verification delays; <= 0 means "use the default for omega1".
    double d_plus = 0.0;
    double d_minus = 0.0;
    double d_cross = 0.0;
    bool include_readout_imprecision = false;

    // Sweep axes.
    double q_min = 1e3, q_max = 1e8;
    int q_count = 200;
    std::string q_scale = "log";
    std::vector<double> chi_list = {1.0, 2.0, 3.0, 4.0, 5.0};
    double tau_min = 0.0, tau_max = 9.42477796076938;  // 3*pi at omega1 = 1
    int tau_count = 200;
    double ratio_min = 1.0, ratio_max = 9.0;
    int ratio_count = 200;
    double eps_min = -0.05, eps_max = 0.05;
    int eps_count = 81;
    double mismatch_min = 0.25, mismatch_max = 2.0;
    int mismatch_count = 101;

    // Optimizer controls.
    std::string opt_method = "simplex"; // simplex|grid_refine
    double opt_tolerance = 1e-6;
    int opt_max_evals = 2000;
    int opt_coarse_points = 64;
    double opt_bound_fraction = 0.035;

    // Wigner slice.
    int stage = 2;                 // 0 thermal, 1 after first pulse, 2 after sequence
    std::string pair = "X+,P+";    // two of X1,P1,X2,P2,X+,P+,X-,P-
    double mean_xplus = 0.0;       // injected collective mean displacement
    double wigner_half_width = 0.0;  // <= 0 means auto (6 sigma)
    int wigner_count = 201;

    // Output.
    std::string out_dir = "out";
    std::string format = "csv";    // csv|json|svg
    std::uint64_t seed = 0;
    int workers = 0;               // 0 = hardware concurrency

    bool operator==(const RunConfig&) const = default;

    // Resolved schedules (apply the <=0 defaults).
    EntangleSchedule entangle_schedule() const;
    VerifySchedule verify_schedule() const;
    OptimizerConfig optimizer_config() const;

    void validate() const;  // throws std::invalid_argument on bad values
};

// Names of all recognized config keys, in serialization order.
std::vector<std::string> config_keys();

// Set one key from its string representation; throws on unknown keys
// (listing the valid ones) and on malformed values.
void apply_key_value(RunConfig& config, const std::string& key, const std::string& value);

// Flat key = value document containing every key; doubles are written with
// 17 significant digits so parsing reproduces them exactly.
std::string serialize_config(const RunConfig& config);

// Parse a key = value document ('#' starts a comment). Unknown keys and
// out-of-range values throw with a diagnostic.
RunConfig parse_config_text(const std::string& text);
RunConfig parse_config_file(const std::string& path);

}  // namespace pomsim
