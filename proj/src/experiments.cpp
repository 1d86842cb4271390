#include "symtop/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "symtop/error.hpp"

namespace symtop {

namespace {

void require_positive_increasing(std::span<const double> values, const char* what) {
    if (values.empty()) throw DomainError(std::string(what) + ": empty value list");
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0) || !std::isfinite(values[i])) {
            throw DomainError(std::string(what) + ": values must be positive");
        }
        if (i > 0 && !(values[i] > values[i - 1])) {
            throw DomainError(std::string(what) + ": values must be strictly increasing");
        }
    }
}

double interpolate(std::span<const double> t, std::span<const double> v, double x) {
    const auto it = std::upper_bound(t.begin(), t.end(), x);
    if (it == t.begin()) return v.front();
    if (it == t.end()) return v.back();
    const std::size_t i = static_cast<std::size_t>(it - t.begin());
    const double f = (x - t[i - 1]) / (t[i] - t[i - 1]);
    return v[i - 1] + f * (v[i] - v[i - 1]);
}

struct LinearFit {
    double scale;
    double offset;
    double rms;
};

LinearFit fit_affine(const Overlap& o) {
    const std::size_t n = o.model.size();
    const double inv_n = 1.0 / static_cast<double>(n);
    const double mean_m = std::accumulate(o.model.begin(), o.model.end(), 0.0) * inv_n;
    const double mean_d = std::accumulate(o.data.begin(), o.data.end(), 0.0) * inv_n;
    double smm = 0.0, smd = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dm = o.model[i] - mean_m;
        smm += dm * dm;
        smd += dm * (o.data[i] - mean_d);
    }
    if (!(smm > 0.0)) throw DegenerateFitError("fit_trace: model has zero variance over the overlap");
    LinearFit fit{smd / smm, 0.0, 0.0};
    fit.offset = mean_d - fit.scale * mean_m;
    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = fit.scale * o.model[i] + fit.offset - o.data[i];
        ss += r * r;
    }
    fit.rms = std::sqrt(ss * inv_n);
    return fit;
}

ScanResult run_scan(const SimulationConfig& base, std::span<const double> values, const ScanOptions& options,
                    const char* parameter, void (*apply)(SimulationConfig&, double)) {
    base.validate();
    const Ensemble ensemble = make_ensemble(base.molecule, base.ensemble);
    const std::vector<double> grid = base.grid.times();
    const double period = echo_spacing(base.molecule);

    ScanResult result;
    result.parameter = parameter;
    result.quantity = options.use_derivative ? "abs_dcos_dt_per_ps" : "abs_cos_theta";
    result.values.assign(values.begin(), values.end());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (options.progress) options.progress(i, values[i]);
        SimulationConfig cfg = base;
        apply(cfg, values[i]);
        cfg.pulse.validate();
        OrientationTrace trace =
            ensemble_orientation(cfg.molecule, ensemble, cfg.pulse, cfg.relaxation, grid, cfg.propagation);
        const auto& v = options.use_derivative ? trace.dcos_dt_per_ps : trace.cos_theta;
        for (Channel c : kChannels) {
            const auto [lo, hi] = channel_window(c, cfg.pulse.t0_ps, period, grid.front());
            const PeakEstimate p = window_peak(trace.time_ps, v, lo, hi);
            auto& ch = result.channels[static_cast<std::size_t>(c)];
            ch.peaks.push_back(p.magnitude);
            ch.peak_times_ps.push_back(p.found ? p.time_ps : std::nan(""));
        }
        if (options.keep_traces) result.traces.push_back(std::move(trace));
    }
    summarize_channels(result);
    return result;
}

}  // namespace

void GridSpec::validate() const {
    if (!std::isfinite(t_start_ps) || !std::isfinite(t_end_ps)) throw ConfigError("grid.t_start and grid.t_end must be finite");
    if (!(dt_ps > 0.0)) throw ConfigError("grid.dt_out must be > 0");
    if (!(t_end_ps > t_start_ps)) throw ConfigError("grid.t_end must exceed grid.t_start");
    if ((t_end_ps - t_start_ps) / dt_ps > 5e7) throw ConfigError("grid.dt_out gives more than 5e7 samples");
}

std::vector<double> GridSpec::times() const {
    validate();
    const auto count = static_cast<std::size_t>(std::floor((t_end_ps - t_start_ps) / dt_ps + 1e-9)) + 1;
    std::vector<double> t(count);
    for (std::size_t i = 0; i < count; ++i) t[i] = t_start_ps + static_cast<double>(i) * dt_ps;
    return t;
}

void SimulationConfig::validate() const {
    molecule.validate();
    ensemble.validate();
    pulse.validate();
    relaxation.validate();
    grid.validate();
    fid.validate();
    if (!(propagation.dt_fs > 0.0)) throw ConfigError("propagation.dt_fs must be > 0");
    if (propagation.min_steps < 1) throw ConfigError("propagation.min_steps must be >= 1");
}

SimulationResult run_simulation(const SimulationConfig& config) {
    config.validate();
    const Ensemble ensemble = make_ensemble(config.molecule, config.ensemble);
    const std::vector<double> grid = config.grid.times();
    SimulationResult result;
    result.trace = ensemble_orientation(config.molecule, ensemble, config.pulse, config.relaxation, grid,
                                        config.propagation);
    result.fid = fid_signal(result.trace, config.fid, config.pulse);
    return result;
}

const char* to_string(Channel channel) {
    switch (channel) {
        case Channel::delay_zero: return "delay_zero";
        case Channel::first_revival: return "first_revival";
        case Channel::second_revival: return "second_revival";
    }
    return "unknown";
}

std::pair<double, double> channel_window(Channel channel, double t0_ps, double period_ps, double grid_start_ps) {
    const double q = 0.25 * period_ps;
    switch (channel) {
        case Channel::delay_zero: return {std::min(grid_start_ps, t0_ps), t0_ps + q};
        case Channel::first_revival: return {t0_ps + period_ps - q, t0_ps + period_ps + q};
        case Channel::second_revival: return {t0_ps + 2.0 * period_ps - q, t0_ps + 2.0 * period_ps + q};
    }
    throw DomainError("unknown channel");
}

PeakEstimate window_peak(std::span<const double> t, std::span<const double> v, double lo_ps, double hi_ps) {
    if (t.size() != v.size()) throw DomainError("window_peak: time and value lengths differ");
    const std::size_t first = static_cast<std::size_t>(std::lower_bound(t.begin(), t.end(), lo_ps) - t.begin());
    const std::size_t last = static_cast<std::size_t>(std::upper_bound(t.begin(), t.end(), hi_ps) - t.begin());
    PeakEstimate p;
    if (first >= last) return p;
    std::size_t best = first;
    for (std::size_t i = first; i < last; ++i) {
        if (std::abs(v[i]) > std::abs(v[best])) best = i;
    }
    p.found = true;
    p.time_ps = t[best];
    p.magnitude = std::abs(v[best]);
    if (best > first && best + 1 < last) {
        const double ym = std::abs(v[best - 1]);
        const double y0 = p.magnitude;
        const double yp = std::abs(v[best + 1]);
        const double denom = ym - 2.0 * y0 + yp;
        if (denom < 0.0) {
            const double delta = 0.5 * (ym - yp) / denom;
            const double h = delta >= 0.0 ? t[best + 1] - t[best] : t[best] - t[best - 1];
            p.time_ps = t[best] + delta * h;
            p.magnitude = y0 - 0.25 * (ym - yp) * delta;
        }
    }
    return p;
}

void summarize_channels(ScanResult& result) {
    const auto& x = result.values;
    for (auto& ch : result.channels) {
        ch.slope.reset();
        ch.r_squared.reset();
        if (ch.peaks.size() != x.size()) throw DomainError("summarize_channels: channel length mismatch");
        if (x.empty()) continue;
        const auto best = std::max_element(ch.peaks.begin(), ch.peaks.end());
        ch.argmax = x[static_cast<std::size_t>(best - ch.peaks.begin())];
        if (x.size() < 2) continue;
        double sxx = 0.0, sxy = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += x[i] * x[i];
            sxy += x[i] * ch.peaks[i];
            mean += ch.peaks[i];
        }
        mean /= static_cast<double>(x.size());
        const double slope = sxy / sxx;
        double ss_res = 0.0, ss_tot = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            ss_res += std::pow(ch.peaks[i] - slope * x[i], 2);
            ss_tot += std::pow(ch.peaks[i] - mean, 2);
        }
        ch.slope = slope;
        if (ss_tot > 0.0) ch.r_squared = 1.0 - ss_res / ss_tot;
    }
}

ScanResult scan_amplitude(const SimulationConfig& base, std::span<const double> amplitudes,
                          const ScanOptions& options) {
    require_positive_increasing(amplitudes, "scan_amplitude");
    return run_scan(base, amplitudes, options, "amplitude_kV_per_cm",
                    [](SimulationConfig& c, double v) { c.pulse.E1_kV_per_cm = v; });
}

ScanResult scan_tau(const SimulationConfig& base, std::span<const double> taus, const ScanOptions& options) {
    require_positive_increasing(taus, "scan_tau");
    return run_scan(base, taus, options, "tau_ps", [](SimulationConfig& c, double v) { c.pulse.tau_ps = v; });
}

std::vector<RevivalPeak> detect_revivals(std::span<const double> t, std::span<const double> v, double period_ps,
                                         int n, double origin_ps, double noise_floor) {
    if (n < 0) throw DomainError("detect_revivals: n must be >= 0");
    if (!(period_ps > 0.0)) throw DomainError("detect_revivals: period must be > 0");
    if (t.size() != v.size()) throw DomainError("detect_revivals: time and value lengths differ");
    std::vector<RevivalPeak> out;
    for (int k = 1; k <= n; ++k) {
        const double centre = origin_ps + k * period_ps;
        const PeakEstimate p = window_peak(t, v, centre - 0.25 * period_ps, centre + 0.25 * period_ps);
        RevivalPeak r;
        r.index = k;
        r.found = p.found && p.magnitude > noise_floor;
        if (r.found) {
            r.time_ps = p.time_ps;
            r.magnitude = p.magnitude;
        }
        out.push_back(r);
    }
    return out;
}

Overlap overlap(const Signal& model, const Signal& data, double shift_ps) {
    if (model.time_ps.size() != model.values.size() || data.time_ps.size() != data.values.size()) {
        throw DomainError("fit_trace: time and value lengths differ");
    }
    Overlap o;
    if (data.time_ps.empty()) return o;
    for (std::size_t i = 1; i < data.time_ps.size(); ++i) {
        if (!(data.time_ps[i] > data.time_ps[i - 1])) throw DomainError("fit_trace: data grid must be increasing");
    }
    const double lo = data.time_ps.front();
    const double hi = data.time_ps.back();
    for (std::size_t i = 0; i < model.time_ps.size(); ++i) {
        const double x = model.time_ps[i] + shift_ps;
        if (x < lo || x > hi) continue;
        o.time_ps.push_back(model.time_ps[i]);
        o.model.push_back(model.values[i]);
        o.data.push_back(interpolate(data.time_ps, data.values, x));
    }
    return o;
}

FitResult fit_trace(const Signal& model, const Signal& data, const FitOptions& options) {
    auto evaluate = [&](double shift) {
        const Overlap o = overlap(model, data, shift);
        if (o.model.size() < 8) {
            throw DomainError("fit_trace: only " + std::to_string(o.model.size()) +
                              " overlapping samples, need at least 8");
        }
        const LinearFit f = fit_affine(o);
        return FitResult{f.scale, f.offset, f.rms, shift, o.model.size()};
    };
    if (!options.time_shift) return evaluate(0.0);
    if (!(options.max_shift_ps > 0.0)) throw DomainError("fit_trace: max_shift must be > 0");

    // Golden-section search on the residual, then keep the best point seen.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = -options.max_shift_ps, b = options.max_shift_ps;
    double c = b - invphi * (b - a), d = a + invphi * (b - a);
    FitResult fc = evaluate(c), fd = evaluate(d);
    FitResult best = evaluate(0.0);
    while (b - a > 1e-5) {
        if (fc.residual_rms < fd.residual_rms) {
            b = d;
            d = c;
            fd = fc;
            c = b - invphi * (b - a);
            fc = evaluate(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + invphi * (b - a);
            fd = evaluate(d);
        }
    }
    for (const FitResult* f : {&fc, &fd}) {
        if (f->residual_rms < best.residual_rms) best = *f;
    }
    return best;
}

}  // namespace symtop
