#include "pomsim/output.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace pomsim {

namespace {

nlohmann::json matrix_to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

nlohmann::json vector_to_json(const Eigen::VectorXd& v) {
    nlohmann::json out = nlohmann::json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

nlohmann::json params_to_json(const SystemParams& p) {
    return nlohmann::json{
        {"omega1", p.omega1}, {"omega2", p.omega2},
        {"q1", p.q1},         {"q2", p.q2},
        {"n_th1", p.n_th1},   {"n_th2", p.n_th2},
        {"chi1", p.chi1},     {"chi2", p.chi2},
    };
}

std::string utc_iso_now() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

// Seven-stop dark-blue-to-yellow ramp, linearly interpolated.
struct Rgb {
    double r, g, b;
};

Rgb colormap(double t) {
    static constexpr Rgb stops[7] = {
        {68, 1, 84},   {69, 55, 129},  {49, 104, 142}, {33, 145, 140},
        {53, 183, 121}, {144, 215, 67}, {253, 231, 37},
    };
    t = std::clamp(t, 0.0, 1.0);
    const double pos = t * 6.0;
    const int lo = std::min(5, static_cast<int>(pos));
    const double f = pos - lo;
    const Rgb& a = stops[lo];
    const Rgb& b = stops[lo + 1];
    return {a.r + f * (b.r - a.r), a.g + f * (b.g - a.g), a.b + f * (b.b - a.b)};
}

std::string rgb_hex(const Rgb& c) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(c.r)),
                  static_cast<int>(std::lround(c.g)), static_cast<int>(std::lround(c.b)));
    return buf;
}

std::string fmt_tick(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

std::string fmt_coord(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

}  // namespace

std::string fmt_g17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_text_atomic(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out)
            throw std::runtime_error("cannot open for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        if (!out)
            throw std::runtime_error("short write to: " + tmp.string());
    }
    fs::rename(tmp, target);
}

std::string csv_from_grid(const SweepGrid& grid) {
    std::string out;
    for (std::size_t i = 0; i < grid.columns.size(); ++i) {
        if (i) out += ",";
        out += grid.columns[i];
    }
    out += "\n";
    for (const auto& row : grid.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out += ",";
            out += fmt_g17(row[i]);
        }
        out += "\n";
    }
    return out;
}

void write_csv_atomic(const std::string& path, const SweepGrid& grid) {
    write_text_atomic(path, csv_from_grid(grid));
}

void write_json_atomic(const std::string& path, const nlohmann::json& j) {
    write_text_atomic(path, j.dump(2) + "\n");
}

nlohmann::json criteria_to_json(const GenerationCriteria& criteria) {
    return nlohmann::json{
        {"chi_above_threshold", criteria.chi_above_threshold},
        {"chi_margin", criteria.chi_margin},
        {"q_above_minimum", criteria.q_above_minimum},
        {"q_margin", criteria.q_margin},
        {"decoherence_small", criteria.decoherence_small},
        {"decoherence_margin", criteria.decoherence_margin},
        {"all", criteria.all()},
    };
}

nlohmann::json report_to_json(const ProtocolReport& report) {
    nlohmann::json j;
    j["params"] = params_to_json(report.params);
    j["schedule"] = {
        {"entangle",
         {{"k", report.entangle.k}, {"l", report.entangle.l}, {"tau", report.entangle.tau}}},
        {"verify",
         {{"d_plus", report.verify.d_plus},
          {"d_minus", report.verify.d_minus},
          {"d_cross", report.verify.d_cross}}},
    };
    j["sigma_ent"] = matrix_to_json(report.sigma_ent);
    j["collective_variances"] = vector_to_json(report.collective_variances);
    j["has_verify"] = report.has_verify;
    j["sigma_ver"] = matrix_to_json(report.sigma_ver);
    j["sigma_ver_true"] = matrix_to_json(report.sigma_ver_true);
    j["e_n_ent"] = report.e_n_ent;
    j["e_n_ver"] = report.e_n_ver;
    j["criteria"] = criteria_to_json(report.criteria);
    return j;
}

nlohmann::json make_manifest(const std::string& command, const std::string& config_text,
                             const std::vector<std::string>& outputs,
                             int workers, double elapsed_seconds) {
    nlohmann::json j;
    j["version"] = kVersion;
    j["command"] = command;
    j["config"] = config_text;
    j["outputs"] = outputs;
    // Everything that may legitimately differ between reruns of the same
    // config (wall time, duration, worker count) lives in this one object.
    j["timestamp"] = {{"iso", utc_iso_now()},
                      {"elapsed_seconds", elapsed_seconds},
                      {"workers", workers}};
    return j;
}

std::string render_heatmap_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& values,
                               const std::string& x_label, const std::string& y_label,
                               const std::string& title) {
    const std::size_t nx = xs.size();
    const std::size_t ny = ys.size();
    if (nx == 0 || ny == 0 || values.size() != nx * ny)
        throw std::invalid_argument("render_heatmap_svg: values must be ny*nx in row-major order");

    double vmin = std::numeric_limits<double>::infinity();
    double vmax = -std::numeric_limits<double>::infinity();
    for (double v : values) {
        if (!std::isfinite(v)) continue;
        vmin = std::min(vmin, v);
        vmax = std::max(vmax, v);
    }
    if (!std::isfinite(vmin)) {
        vmin = 0.0;
        vmax = 1.0;
    }
    const double span = vmax > vmin ? vmax - vmin : 1.0;

    constexpr double width = 800.0, height = 640.0;
    constexpr double left = 70.0, right = 110.0, top = 40.0, bottom = 50.0;
    const double plot_w = width - left - right;
    const double plot_h = height - top - bottom;
    const double cell_w = plot_w / static_cast<double>(nx);
    const double cell_h = plot_h / static_cast<double>(ny);

    std::string svg;
    svg.reserve(64 * values.size() + 4096);
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"640\" "
           "viewBox=\"0 0 800 640\">\n";
    svg += "<rect width=\"800\" height=\"640\" fill=\"white\"/>\n";

    // Cells: row r is ys[r], drawn with the y axis increasing upward.
    for (std::size_t r = 0; r < ny; ++r) {
        const double y = top + plot_h - (static_cast<double>(r) + 1.0) * cell_h;
        for (std::size_t c = 0; c < nx; ++c) {
            const double v = values[r * nx + c];
            const std::string fill =
                std::isfinite(v) ? rgb_hex(colormap((v - vmin) / span)) : "#cccccc";
            svg += "<rect x=\"" + fmt_coord(left + static_cast<double>(c) * cell_w) + "\" y=\"" +
                   fmt_coord(y) + "\" width=\"" + fmt_coord(cell_w + 0.5) + "\" height=\"" +
                   fmt_coord(cell_h + 0.5) + "\" fill=\"" + fill + "\"/>\n";
        }
    }

    svg += "<rect x=\"" + fmt_coord(left) + "\" y=\"" + fmt_coord(top) + "\" width=\"" +
           fmt_coord(plot_w) + "\" height=\"" + fmt_coord(plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";

    // Color bar with min/max labels.
    const double bar_x = width - right + 30.0;
    const double bar_w = 18.0;
    constexpr int bar_steps = 64;
    for (int i = 0; i < bar_steps; ++i) {
        const double t = (static_cast<double>(i) + 0.5) / bar_steps;
        const double y = top + plot_h - (static_cast<double>(i) + 1.0) * plot_h / bar_steps;
        svg += "<rect x=\"" + fmt_coord(bar_x) + "\" y=\"" + fmt_coord(y) + "\" width=\"" +
               fmt_coord(bar_w) + "\" height=\"" + fmt_coord(plot_h / bar_steps + 0.5) +
               "\" fill=\"" + rgb_hex(colormap(t)) + "\"/>\n";
    }
    svg += "<rect x=\"" + fmt_coord(bar_x) + "\" y=\"" + fmt_coord(top) + "\" width=\"" +
           fmt_coord(bar_w) + "\" height=\"" + fmt_coord(plot_h) +
           "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt_coord(bar_x + bar_w + 6.0) + "\" y=\"" + fmt_coord(top + 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + fmt_tick(vmax) + "</text>\n";
    svg += "<text x=\"" + fmt_coord(bar_x + bar_w + 6.0) + "\" y=\"" + fmt_coord(top + plot_h) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + fmt_tick(vmin) + "</text>\n";

    // Axis extents and labels.
    svg += "<text x=\"" + fmt_coord(left) + "\" y=\"" + fmt_coord(height - bottom + 20.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\">" + fmt_tick(xs.front()) + "</text>\n";
    svg += "<text x=\"" + fmt_coord(left + plot_w) + "\" y=\"" +
           fmt_coord(height - bottom + 20.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">" +
           fmt_tick(xs.back()) + "</text>\n";
    svg += "<text x=\"" + fmt_coord(left - 8.0) + "\" y=\"" + fmt_coord(top + plot_h) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">" +
           fmt_tick(ys.front()) + "</text>\n";
    svg += "<text x=\"" + fmt_coord(left - 8.0) + "\" y=\"" + fmt_coord(top + 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"13\" text-anchor=\"end\">" +
           fmt_tick(ys.back()) + "</text>\n";
    svg += "<text x=\"" + fmt_coord(left + plot_w / 2.0) + "\" y=\"" +
           fmt_coord(height - 12.0) +
           "\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\">" + x_label +
           "</text>\n";
    svg += "<text x=\"18\" y=\"" + fmt_coord(top + plot_h / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"15\" text-anchor=\"middle\" "
           "transform=\"rotate(-90 18 " +
           fmt_coord(top + plot_h / 2.0) + ")\">" + y_label + "</text>\n";
    svg += "<text x=\"" + fmt_coord(left + plot_w / 2.0) + "\" y=\"24\" "
           "font-family=\"sans-serif\" font-size=\"16\" text-anchor=\"middle\">" +
           title + "</text>\n";
    svg += "</svg>\n";
    return svg;
}

}  // namespace pomsim
