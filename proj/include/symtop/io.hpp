#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "symtop/experiments.hpp"

// Config files, manifests, CSV and JSON output.
//
// Config files are flat `section.key = value` lines; '#' starts a comment.
// Every key overrides exactly one default and unknown keys are rejected.

namespace symtop::io {

/// All accepted keys, in canonical order.
const std::vector<std::string>& config_keys();

void apply_setting(SimulationConfig& config, std::string_view key, std::string_view value);

/// Parses `key = value` (as given to --set).
void apply_override(SimulationConfig& config, std::string_view assignment);

/// Starts from the defaults. Errors carry the origin and line number.
SimulationConfig parse_config(std::string_view text, std::string_view origin = "<config>");
SimulationConfig load_config(const std::filesystem::path& path);

/// Every key with its current value; parse_config(config_text(c)) == c.
std::string config_text(const SimulationConfig& config);

/// Shortest decimal that round-trips.
std::string format_number(double value);

/// JSON record of the full config, constants and output files of a run.
std::string manifest_json(const SimulationConfig& config, std::string_view command,
                          const std::vector<std::string>& outputs);

void write_text(const std::filesystem::path& path, std::string_view text);

/// CSV with a `# manifest:` reference line and unit-bearing header.
std::string trace_csv(const OrientationTrace& trace, std::string_view manifest_name);
std::string signal_csv(const Signal& signal, std::string_view value_header, std::string_view manifest_name);

/// Two numeric columns (time_ps, value). Lines starting with '#' and a
/// non-numeric first row are skipped; other malformed rows throw ConfigError
/// naming the line.
Signal read_signal_csv(const std::filesystem::path& path);
Signal parse_signal_csv(std::string_view text, std::string_view origin = "<csv>");

/// time_ps, scaled model and data on the model grid, in the data's units.
std::string overlay_csv(const Overlap& overlap, const FitResult& fit, std::string_view manifest_name);

std::string scan_json(const ScanResult& result, std::string_view manifest_name);
/// `relative_residual` is residual_rms over the rms of the data.
std::string fit_json(const FitResult& result, double relative_residual, std::string_view data_path,
                     std::string_view manifest_name);
std::string spectral_json(const SpectralCheckReport& report, std::string_view manifest_name);

}  // namespace symtop::io
