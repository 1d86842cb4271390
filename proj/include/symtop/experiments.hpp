#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "symtop/dynamics.hpp"
#include "symtop/fid.hpp"

// Numerical studies built on the dynamics: single runs, amplitude and pulse
// duration scans, revival detection and fitting of a model FID to data.

namespace symtop {

/// Uniform output grid t_start, t_start + dt, ..., up to t_end inclusive.
struct GridSpec {
    double t_start_ps = 0.0;
    double t_end_ps = 160.0;
    double dt_ps = 0.01;

    void validate() const;
    std::vector<double> times() const;
};

struct SimulationConfig {
    MoleculeSpec molecule;
    EnsembleSpec ensemble;
    PulseSpec pulse;
    RelaxationSpec relaxation;
    GridSpec grid;
    FidSpec fid;
    PropagationOptions propagation;
    std::string output_dir = "out";

    void validate() const;
};

struct SimulationResult {
    OrientationTrace trace;
    Signal fid;
};

SimulationResult run_simulation(const SimulationConfig& config);

enum class Channel { delay_zero = 0, first_revival = 1, second_revival = 2 };
inline constexpr std::array<Channel, 3> kChannels = {Channel::delay_zero, Channel::first_revival,
                                                     Channel::second_revival};
const char* to_string(Channel channel);

/// Search window of a channel, measured from the pulse centre t0 with P the
/// echo period: delay zero is [start of grid, t0 + P/4], revival k is
/// [t0 + kP - P/4, t0 + kP + P/4].
std::pair<double, double> channel_window(Channel channel, double t0_ps, double period_ps, double grid_start_ps);

struct PeakEstimate {
    bool found = false;
    double time_ps = 0.0;
    double magnitude = 0.0;
};

/// Largest |values| on [lo, hi], refined by a three-point parabola.
PeakEstimate window_peak(std::span<const double> time_ps, std::span<const double> values, double lo_ps, double hi_ps);

struct ChannelSummary {
    std::vector<double> peaks;
    std::vector<double> peak_times_ps;
    /// Least-squares line through the origin; undefined for fewer than two values.
    std::optional<double> slope;
    std::optional<double> r_squared;
    double argmax = 0.0;  // parameter value of the largest peak
};

struct ScanResult {
    std::string parameter;  // "amplitude_kV_per_cm" or "tau_ps"
    std::string quantity;   // "abs_cos_theta" or "abs_dcos_dt_per_ps"
    std::vector<double> values;
    std::array<ChannelSummary, 3> channels;
    std::vector<OrientationTrace> traces;  // filled when ScanOptions::keep_traces
    const ChannelSummary& channel(Channel c) const { return channels[static_cast<std::size_t>(c)]; }
};

struct ScanOptions {
    bool use_derivative = false;
    bool keep_traces = false;
    std::function<void(std::size_t index, double value)> progress;
};

ScanResult scan_amplitude(const SimulationConfig& base, std::span<const double> amplitudes_kV_per_cm,
                          const ScanOptions& options = {});
ScanResult scan_tau(const SimulationConfig& base, std::span<const double> taus_ps, const ScanOptions& options = {});

/// Fills slope, R^2 and argmax from the peaks.
void summarize_channels(ScanResult& result);

struct RevivalPeak {
    int index = 0;  // k = 1..n
    bool found = false;
    double time_ps = 0.0;
    double magnitude = 0.0;
};

/// Peaks of |values| in the windows [origin + k P - P/4, origin + k P + P/4].
/// A window with no samples, or whose peak does not exceed `noise_floor`,
/// yields a revival with found = false.
std::vector<RevivalPeak> detect_revivals(std::span<const double> time_ps, std::span<const double> values,
                                         double period_ps, int n, double origin_ps = 0.0, double noise_floor = 0.0);

struct FitOptions {
    bool time_shift = false;
    double max_shift_ps = 2.0;
};

struct FitResult {
    double scale = 0.0;
    double offset = 0.0;
    double residual_rms = 0.0;
    double time_shift_ps = 0.0;
    std::size_t samples = 0;
};

/// Least-squares scale and offset so that scale * model + offset matches the
/// data, which is linearly interpolated onto the model grid (shifted by the
/// time shift) where the two overlap.
FitResult fit_trace(const Signal& model, const Signal& data, const FitOptions& options = {});

/// Data interpolated at model times + shift, for the overlapping samples.
struct Overlap {
    std::vector<double> time_ps;
    std::vector<double> model;
    std::vector<double> data;
};
Overlap overlap(const Signal& model, const Signal& data, double shift_ps = 0.0);

}  // namespace symtop
