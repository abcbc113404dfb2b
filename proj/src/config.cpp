#include "pomsim/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>

#include "pomsim/output.hpp"

namespace pomsim {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not a number: " + value);
    }
    if (used != value.size())
        throw std::invalid_argument("config key '" + key + "': trailing junk in: " + value);
    return v;
}

long long to_ll(const std::string& key, const std::string& value) {
    std::size_t used = 0;
    long long v = 0;
    try {
        v = std::stoll(value, &used);
    } catch (const std::exception&) {
        throw std::invalid_argument("config key '" + key + "': not an integer: " + value);
    }
    if (used != value.size())
        throw std::invalid_argument("config key '" + key + "': trailing junk in: " + value);
    return v;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw std::invalid_argument("config key '" + key + "': expected true/false: " + value);
}

// One config key: how to set it from text and how to print it back.
struct KeyHandler {
    std::string name;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
};

KeyHandler key_double(const std::string& name,
                      std::function<double&(RunConfig&)> ref) {
    return {name,
            [name, ref](RunConfig& c, const std::string& v) { ref(c) = to_double(name, v); },
            [ref](const RunConfig& c) { return fmt_g17(ref(const_cast<RunConfig&>(c))); }};
}

KeyHandler key_int(const std::string& name, std::function<int&(RunConfig&)> ref) {
    return {name,
            [name, ref](RunConfig& c, const std::string& v) {
                ref(c) = static_cast<int>(to_ll(name, v));
            },
            [ref](const RunConfig& c) {
                return std::to_string(ref(const_cast<RunConfig&>(c)));
            }};
}

KeyHandler key_u64(const std::string& name,
                   std::function<std::uint64_t&(RunConfig&)> ref) {
    return {name,
            [name, ref](RunConfig& c, const std::string& v) {
                ref(c) = static_cast<std::uint64_t>(to_ll(name, v));
            },
            [ref](const RunConfig& c) {
                return std::to_string(ref(const_cast<RunConfig&>(c)));
            }};
}

KeyHandler key_bool(const std::string& name, std::function<bool&(RunConfig&)> ref) {
    return {name,
            [name, ref](RunConfig& c, const std::string& v) { ref(c) = to_bool(name, v); },
            [ref](const RunConfig& c) {
                return ref(const_cast<RunConfig&>(c)) ? "true" : "false";
            }};
}

KeyHandler key_string(const std::string& name,
                      std::function<std::string&(RunConfig&)> ref) {
    return {name,
            [ref](RunConfig& c, const std::string& v) { ref(c) = v; },
            [ref](const RunConfig& c) { return ref(const_cast<RunConfig&>(c)); }};
}

KeyHandler key_list(const std::string& name,
                    std::function<std::vector<double>&(RunConfig&)> ref) {
    return {name,
            [name, ref](RunConfig& c, const std::string& v) {
                std::vector<double> out;
                std::stringstream ss(v);
                std::string item;
                while (std::getline(ss, item, ',')) {
                    item = trim(item);
                    if (!item.empty()) out.push_back(to_double(name, item));
                }
                if (out.empty())
                    throw std::invalid_argument("config key '" + name + "': empty list");
                ref(c) = out;
            },
            [ref](const RunConfig& c) {
                const auto& list = ref(const_cast<RunConfig&>(c));
                std::string out;
                for (std::size_t i = 0; i < list.size(); ++i) {
                    if (i) out += ",";
                    out += fmt_g17(list[i]);
                }
                return out;
            }};
}

const std::vector<KeyHandler>& handlers() {
    auto d = [](auto member) {
        return std::function<double&(RunConfig&)>(
            [member](RunConfig& c) -> double& { return c.*member; });
    };
    auto dp = [](auto member) {
        return std::function<double&(RunConfig&)>(
            [member](RunConfig& c) -> double& { return c.params.*member; });
    };
    auto i = [](auto member) {
        return std::function<int&(RunConfig&)>(
            [member](RunConfig& c) -> int& { return c.*member; });
    };
    auto s = [](auto member) {
        return std::function<std::string&(RunConfig&)>(
            [member](RunConfig& c) -> std::string& { return c.*member; });
    };
    static const std::vector<KeyHandler> table = {
        key_string("command", s(&RunConfig::command)),
        key_string("sweep", s(&RunConfig::sweep_name)),
        key_double("omega1", dp(&SystemParams::omega1)),
        key_double("omega2", dp(&SystemParams::omega2)),
        key_double("q1", dp(&SystemParams::q1)),
        key_double("q2", dp(&SystemParams::q2)),
        key_double("n_th1", dp(&SystemParams::n_th1)),
        key_double("n_th2", dp(&SystemParams::n_th2)),
        key_double("chi1", dp(&SystemParams::chi1)),
        key_double("chi2", dp(&SystemParams::chi2)),
        key_int("k", i(&RunConfig::k)),
        key_int("l", i(&RunConfig::l)),
        key_double("tau", d(&RunConfig::tau)),
        key_double("d_plus", d(&RunConfig::d_plus)),
        key_double("d_minus", d(&RunConfig::d_minus)),
        key_double("d_cross", d(&RunConfig::d_cross)),
        key_bool("include_readout_imprecision",
                 [](RunConfig& c) -> bool& { return c.include_readout_imprecision; }),
        key_double("q_min", d(&RunConfig::q_min)),
        key_double("q_max", d(&RunConfig::q_max)),
        key_int("q_count", i(&RunConfig::q_count)),
        key_string("q_scale", s(&RunConfig::q_scale)),
        key_list("chi_list", [](RunConfig& c) -> std::vector<double>& { return c.chi_list; }),
        key_double("tau_min", d(&RunConfig::tau_min)),
        key_double("tau_max", d(&RunConfig::tau_max)),
        key_int("tau_count", i(&RunConfig::tau_count)),
        key_double("ratio_min", d(&RunConfig::ratio_min)),
        key_double("ratio_max", d(&RunConfig::ratio_max)),
        key_int("ratio_count", i(&RunConfig::ratio_count)),
        key_double("eps_min", d(&RunConfig::eps_min)),
        key_double("eps_max", d(&RunConfig::eps_max)),
        key_int("eps_count", i(&RunConfig::eps_count)),
        key_double("mismatch_min", d(&RunConfig::mismatch_min)),
        key_double("mismatch_max", d(&RunConfig::mismatch_max)),
        key_int("mismatch_count", i(&RunConfig::mismatch_count)),
        key_string("opt_method", s(&RunConfig::opt_method)),
        key_double("opt_tolerance", d(&RunConfig::opt_tolerance)),
        key_int("opt_max_evals", i(&RunConfig::opt_max_evals)),
        key_int("opt_coarse_points", i(&RunConfig::opt_coarse_points)),
        key_double("opt_bound_fraction", d(&RunConfig::opt_bound_fraction)),
        key_int("stage", i(&RunConfig::stage)),
        key_string("pair", s(&RunConfig::pair)),
        key_double("mean_xplus", d(&RunConfig::mean_xplus)),
        key_double("wigner_half_width", d(&RunConfig::wigner_half_width)),
        key_int("wigner_count", i(&RunConfig::wigner_count)),
        key_string("out", s(&RunConfig::out_dir)),
        key_string("format", s(&RunConfig::format)),
        key_u64("seed", [](RunConfig& c) -> std::uint64_t& { return c.seed; }),
        key_int("workers", i(&RunConfig::workers)),
    };
    return table;
}

template <class T>
bool one_of(const T& v, std::initializer_list<T> allowed) {
    return std::find(allowed.begin(), allowed.end(), v) != allowed.end();
}

}  // namespace

EntangleSchedule RunConfig::entangle_schedule() const {
    if (tau > 0.0) return EntangleSchedule{k, l, tau};
    return make_entangle_schedule(params, k, l);
}

VerifySchedule RunConfig::verify_schedule() const {
    VerifySchedule schedule = default_verify_schedule(params);
    if (d_plus > 0.0) schedule.d_plus = d_plus;
    if (d_minus > 0.0) schedule.d_minus = d_minus;
    if (d_cross > 0.0) schedule.d_cross = d_cross;
    return schedule;
}

OptimizerConfig RunConfig::optimizer_config() const {
    OptimizerConfig cfg;
    cfg.method = opt_method == "grid_refine" ? OptimizerConfig::Method::grid_refine
                                             : OptimizerConfig::Method::simplex;
    cfg.tolerance = opt_tolerance;
    cfg.max_evals = opt_max_evals;
    cfg.coarse_points = opt_coarse_points;
    cfg.delay_bound_fraction = opt_bound_fraction;
    return cfg;
}

void RunConfig::validate() const {
    params.validate();
    if (!one_of<std::string>(command,
                             {"entangle", "verify", "single-pulse", "sweep", "wigner", "criteria"}))
        throw std::invalid_argument("config: unknown command '" + command +
                                    "' (entangle|verify|single-pulse|sweep|wigner|criteria)");
    if (!one_of<std::string>(sweep_name,
                             {"en-vs-q", "timing", "verify-opt", "coupling", "max-en"}))
        throw std::invalid_argument("config: unknown sweep '" + sweep_name +
                                    "' (en-vs-q|timing|verify-opt|coupling|max-en)");
    if (!one_of<std::string>(format, {"csv", "json", "svg"}))
        throw std::invalid_argument("config: format must be csv, json or svg");
    if (!one_of<std::string>(q_scale, {"linear", "log"}))
        throw std::invalid_argument("config: q_scale must be linear or log");
    if (!one_of<std::string>(opt_method, {"simplex", "grid_refine"}))
        throw std::invalid_argument("config: opt_method must be simplex or grid_refine");
    if (k < 0 || l < 0)
        throw std::invalid_argument("config: k and l must be nonnegative");
    if (tau < 0.0)
        throw std::invalid_argument("config: tau must be nonnegative (0 = derive from k,l)");
    if (q_count < 2 || tau_count < 2 || ratio_count < 2 || eps_count < 2 ||
        mismatch_count < 2 || wigner_count < 2)
        throw std::invalid_argument("config: axis counts must be at least 2");
    for (double chi : chi_list)
        if (chi < 0.0)
            throw std::invalid_argument("config: chi_list entries must be nonnegative");
    if (eps_min <= -1.0)
        throw std::invalid_argument("config: eps_min must be above -1 (chi2 stays nonnegative)");
    if (mismatch_min < 0.0)
        throw std::invalid_argument("config: mismatch_min must be nonnegative");
    if (!(opt_tolerance > 0.0))
        throw std::invalid_argument("config: opt_tolerance must be positive");
    if (opt_max_evals < 1 || opt_coarse_points < 2)
        throw std::invalid_argument("config: optimizer budget out of range");
    if (!(opt_bound_fraction > 0.0) || opt_bound_fraction >= 1.0)
        throw std::invalid_argument("config: opt_bound_fraction must be in (0,1)");
    if (stage < 0 || stage > 2)
        throw std::invalid_argument("config: stage must be 0, 1 or 2");
    if (workers < 0)
        throw std::invalid_argument("config: workers must be nonnegative");
}

std::vector<std::string> config_keys() {
    std::vector<std::string> keys;
    for (const auto& h : handlers()) keys.push_back(h.name);
    return keys;
}

void apply_key_value(RunConfig& config, const std::string& key, const std::string& value) {
    for (const auto& h : handlers()) {
        if (h.name == key) {
            h.set(config, value);
            return;
        }
    }
    std::string valid;
    for (const auto& h : handlers()) {
        if (!valid.empty()) valid += ", ";
        valid += h.name;
    }
    throw std::invalid_argument("config: unknown key '" + key + "'; valid keys: " + valid);
}

std::string serialize_config(const RunConfig& config) {
    std::string out;
    for (const auto& h : handlers()) {
        out += h.name;
        out += " = ";
        out += h.get(config);
        out += "\n";
    }
    return out;
}

RunConfig parse_config_text(const std::string& text) {
    RunConfig config;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(lineno) +
                                        ": expected 'key = value'");
        apply_key_value(config, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    config.validate();
    return config;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw std::invalid_argument("config: cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace pomsim
