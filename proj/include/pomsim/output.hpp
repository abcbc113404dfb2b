#pragma once

#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "pomsim/protocol.hpp"
#include "pomsim/sweep.hpp"

namespace pomsim {

inline constexpr const char* kVersion = "1.0.0";

// Double formatted with 17 significant digits: enough to round-trip the
// exact bit pattern, and stable across runs for byte-identical outputs.
std::string fmt_g17(double v);

// Write via a temporary file in the same directory followed by a rename, so
// readers never observe a partially-written file.
void write_text_atomic(const std::string& path, const std::string& content);

std::string csv_from_grid(const SweepGrid& grid);
void write_csv_atomic(const std::string& path, const SweepGrid& grid);

void write_json_atomic(const std::string& path, const nlohmann::json& j);

nlohmann::json report_to_json(const ProtocolReport& report);
nlohmann::json criteria_to_json(const GenerationCriteria& criteria);

// Run manifest: version, command echo, serialized config, output inventory.
// Everything that may differ between reruns of the same config (wall clock,
// duration, worker count) lives inside the "timestamp" object so byte-level
// comparisons can drop that single field.
nlohmann::json make_manifest(const std::string& command, const std::string& config_text,
                             const std::vector<std::string>& outputs,
                             int workers, double elapsed_seconds);

// Minimal SVG heatmap of a 2-D grid (values in row-major order, ny rows of
// nx) with a fixed dark-blue-to-yellow colormap and a labeled color bar.
std::string render_heatmap_svg(const std::vector<double>& xs, const std::vector<double>& ys,
                               const std::vector<double>& values,
                               const std::string& x_label, const std::string& y_label,
                               const std::string& title);

}  // namespace pomsim
