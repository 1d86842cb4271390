// Acceptance run: one PASS/FAIL line per criterion.
//
// Criteria that do not hold are reported as FAIL; the process still exits 0
// so that ctest records a completed run. A crash or exception exits 1.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "symtop/experiments.hpp"
#include "symtop/io.hpp"
#include "symtop/thermal.hpp"

using namespace symtop;

namespace {

using Clock = std::chrono::steady_clock;

int failures = 0;
std::map<int, std::string> lines;  // printed in criterion order at the end

void report(int id, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    char head[16];
    std::snprintf(head, sizeof head, "C%-2d %s  ", id, pass ? "PASS" : "FAIL");
    lines[id] = head + detail;
    std::fprintf(stderr, "%s\n", lines[id].c_str());
}

void print_lines() {
    for (const auto& [id, line] : lines) std::printf("%s\n", line.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

void progress(const char* what, Clock::time_point start) {
    const double s = std::chrono::duration<double>(Clock::now() - start).count();
    std::fprintf(stderr, "  [%7.1f s] %s\n", s, what);
}

double revival_peak(const OrientationTrace& tr, std::span<const double> values, Channel c, double t0, double p) {
    const auto [lo, hi] = channel_window(c, t0, p, tr.time_ps.front());
    return window_peak(tr.time_ps, values, lo, hi).magnitude;
}

// Peaks of one quantity per channel for a set of traces.
ScanResult summarize(const std::vector<OrientationTrace>& traces, std::span<const double> values, bool derivative,
                     double t0, double p) {
    ScanResult r;
    r.values.assign(values.begin(), values.end());
    for (const auto& tr : traces) {
        const auto& v = derivative ? tr.dcos_dt_per_ps : tr.cos_theta;
        for (Channel c : kChannels) {
            r.channels[static_cast<std::size_t>(c)].peaks.push_back(revival_peak(tr, v, c, t0, p));
        }
    }
    summarize_channels(r);
    return r;
}

}  // namespace

int main() try {
    const auto start = Clock::now();
    const SimulationConfig base;  // CH3I constants, 298 K, J_max 90, E1 = 100 kV/cm, tau = 1 ps
    const double t0 = base.pulse.t0_ps;
    const double period = echo_spacing(base.molecule);
    const Ensemble ensemble = make_ensemble(base.molecule, base.ensemble);
    std::fprintf(stderr, "ensemble: %zu members, echo period %.4f ps\n", ensemble.members.size(), period);

    // One undamped production trace, 2 fs sampling, long enough for the
    // damped signal to decay below 1e-6 of its peak.
    RelaxationSpec no_relax;
    no_relax.pressure_bar = 0.0;
    GridSpec long_grid;
    long_grid.t_start_ps = -8.0;
    long_grid.t_end_ps = 1100.0;
    long_grid.dt_ps = 0.002;
    const auto grid = long_grid.times();
    const OrientationTrace undamped =
        ensemble_orientation(base.molecule, ensemble, base.pulse, no_relax, grid, base.propagation);
    const OrientationTrace damped = apply_relaxation(undamped, base.relaxation, t0);
    progress("production trace", start);

    // 1. Revival timing.
    {
        const auto r = detect_revivals(damped.time_ps, damped.cos_theta, period, 2, t0);
        const bool ok = r[0].found && r[1].found && std::abs(r[0].time_ps - 66.4) <= 1.5 &&
                        std::abs(r[1].time_ps - 132.9) <= 1.5;
        report(1, ok, fmt("first %.3f ps (66.4 +- 1.5), second %.3f ps (132.9 +- 1.5)", r[0].time_ps, r[1].time_ps));
    }

    // 2. Orientation magnitude.
    {
        const double d1 = revival_peak(damped, damped.cos_theta, Channel::first_revival, t0, period);
        const double d2 = revival_peak(damped, damped.cos_theta, Channel::second_revival, t0, period);
        const double u1 = revival_peak(undamped, undamped.cos_theta, Channel::first_revival, t0, period);
        const bool ok = d1 >= 3.5e-4 && d1 <= 6.5e-4 && d2 >= 1.3e-4 && d2 <= 2.7e-4 && u1 > 1e-3;
        report(2, ok,
               fmt("P=0.35 bar: first %.3e [3.5e-4, 6.5e-4], second %.3e [1.3e-4, 2.7e-4]; P=0: first %.3e (> 1e-3)",
                   d1, d2, u1));
    }

    // 4. Pulse duration scan.
    {
        std::vector<double> taus;
        for (int i = 0; i <= 14; ++i) taus.push_back(0.5 + 0.25 * i);
        SimulationConfig cfg = base;
        cfg.grid.t_start_ps = -15.0;
        cfg.grid.t_end_ps = 150.0;
        ScanOptions opt;
        opt.keep_traces = true;
        opt.progress = [&](std::size_t, double v) { progress(fmt("tau %g ps", v).c_str(), start); };
        const ScanResult scan = scan_tau(cfg, taus, opt);
        const ScanResult der = summarize(scan.traces, taus, true, t0, period);
        const double a0 = scan.channel(Channel::delay_zero).argmax;
        const double a1 = scan.channel(Channel::first_revival).argmax;
        const double a2 = scan.channel(Channel::second_revival).argmax;
        const bool ok = std::abs(a1 - 2.0) <= 0.5 && std::abs(a2 - 2.0) <= 0.5 && a0 != a1 && a0 != a2;
        report(4, ok,
               fmt("argmax tau: first revival %.2f, second %.2f (2.0 +- 0.5), delay zero %.2f (must differ); "
                   "FID channels %.2f/%.2f/%.2f",
                   a1, a2, a0, der.channel(Channel::first_revival).argmax, der.channel(Channel::second_revival).argmax,
                   der.channel(Channel::delay_zero).argmax));
    }

    // 3 and 5. Amplitude scan; results are printed in criterion order.
    {
        SimulationConfig cfg = base;
        cfg.grid.t_start_ps = -5.0;
        cfg.grid.t_end_ps = 150.0;
        const std::vector<double> amps{20.0, 40.0, 60.0, 80.0, 100.0};
        ScanOptions opt;
        opt.keep_traces = true;
        opt.progress = [&](std::size_t, double v) { progress(fmt("amplitude %g kV/cm", v).c_str(), start); };
        const ScanResult scan = scan_amplitude(cfg, amps, opt);
        const ScanResult cos_r = summarize(scan.traces, amps, false, t0, period);
        const ScanResult der_r = summarize(scan.traces, amps, true, t0, period);
        double worst = 1.0;
        std::string detail = "R^2";
        for (const ScanResult* r : {&cos_r, &der_r}) {
            for (Channel c : kChannels) {
                const double r2 = r->channel(c).r_squared.value_or(0.0);
                worst = std::min(worst, r2);
                detail += fmt(" %s/%s=%.6f", r == &cos_r ? "cos" : "dcos", to_string(c), r2);
            }
        }
        report(3, worst > 0.999, detail + " (each > 0.999)");

        const auto [lo, hi] = channel_window(Channel::first_revival, t0, period, cfg.grid.t_start_ps);
        auto normalized = [&](const OrientationTrace& tr) {
            std::vector<double> w;
            for (std::size_t i = 0; i < tr.time_ps.size(); ++i) {
                if (tr.time_ps[i] >= lo && tr.time_ps[i] <= hi) w.push_back(tr.dcos_dt_per_ps[i]);
            }
            double m = 0.0;
            for (double v : w) m = std::max(m, std::abs(v));
            for (double& v : w) v /= m;
            return w;
        };
        const auto a = normalized(scan.traces.front());
        const auto b = normalized(scan.traces.back());
        double diff = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) diff = std::max(diff, std::abs(a[i] - b[i]));
        report(5, diff < 1e-3 && a.size() == b.size() && !a.empty(),
               fmt("max pointwise difference %.3e over %zu samples (< 1e-3)", diff, a.size()));
    }

    // 6. Matrix elements against 3j and quadrature.
    {
        double worst = 0.0;
        int count = 0;
        for (int J = 0; J <= 8; ++J) {
            for (int K = -J; K <= J; ++K) {
                for (int M = -J; M <= J; ++M) {
                    const double d = cos_theta_diagonal(J, K, M);
                    worst = std::max({worst, std::abs(d - oracle::cos_element_3j(J, J, K, M)),
                                      std::abs(d - oracle::cos_element_quadrature(J, J, K, M))});
                    if (J < 8) {
                        const double c = cos_theta_coupling(J, K, M);
                        worst = std::max({worst, std::abs(c - oracle::cos_element_3j(J + 1, J, K, M)),
                                          std::abs(c - oracle::cos_element_quadrature(J + 1, J, K, M))});
                    }
                    ++count;
                }
            }
        }
        report(6, worst <= 1e-12, fmt("%d states, max deviation %.3e (<= 1e-12)", count, worst));
    }

    // 7. Conservation.
    {
        const double drift = undamped.diagnostics.max_norm_drift;
        PulseSpec off = base.pulse;
        off.E1_kV_per_cm = 0.0;
        GridSpec g;
        g.t_start_ps = -5.0;
        g.t_end_ps = 200.0;
        g.dt_ps = 0.01;
        const auto zero = ensemble_orientation(base.molecule, ensemble, off, no_relax, g.times(), base.propagation);
        double z_max = 0.0;
        for (double v : zero.cos_theta) z_max = std::max(z_max, std::abs(v));
        const double z90 = partition_function_unchecked(base.molecule, base.ensemble.temperature_K, 90);
        const double z120 = partition_function_unchecked(base.molecule, base.ensemble.temperature_K, 120);
        const double z_rel = std::abs(z90 - z120) / z120;
        const bool ok = drift <= 1e-10 && z_max <= 1e-14 && z_rel <= 1e-10;
        report(7, ok,
               fmt("norm drift %.3e (<= 1e-10), zero-field |cos| %.3e (<= 1e-14), Z(90) vs Z(120) %.3e (<= 1e-10)",
                   drift, z_max, z_rel));
        progress("conservation", start);
    }

    // 8. Spectral identity on the damped production trace.
    {
        const auto r = spectral_derivative_check(damped);
        report(8, r.max_deviation < 1e-6,
               fmt("deviation %.3e over %zu samples, endpoint ratio %.1e (< 1e-6)", r.max_deviation, r.samples,
                   r.endpoint_ratio));
    }

    // 9. First-order FID against full exponential propagation.
    {
        std::vector<double> incident;
        incident.reserve(damped.time_ps.size());
        for (double t : damped.time_ps) incident.push_back(field_at(base.pulse, t));
        const double alpha = base.fid.alpha_kV_per_cm_ps;
        const auto full = oracle::compare_propagation(damped.time_ps, incident, damped.cos_theta,
                                                      damped.dcos_dt_per_ps, alpha);
        const auto half = oracle::compare_propagation(damped.time_ps, incident, damped.cos_theta,
                                                      damped.dcos_dt_per_ps, alpha / 2.0);
        const double ratio = full.full_vs_first / half.full_vs_first;
        report(9, std::abs(ratio - 4.0) <= 0.5,
               fmt("deviation %.3e at alpha, %.3e at alpha/2, ratio %.3f (4 +- 0.5); max |g| %.2e", full.full_vs_first,
                   half.full_vs_first, ratio, full.max_abs_g));
        progress("propagation oracle", start);
    }

    // 10. Determinism across thread counts.
    {
        auto csv = [&](unsigned threads) {
            SimulationConfig cfg = base;
            cfg.propagation.threads = threads;
            const auto r = run_simulation(cfg);
            return io::trace_csv(r.trace, "manifest.json") + io::signal_csv(r.fid, "fid_kV_per_cm", "manifest.json");
        };
        const std::string one = csv(1);
        const std::string four = csv(4);
        const std::string again = csv(4);
        report(10, one == four && four == again,
               fmt("%zu bytes; 1 vs 4 threads %s, repeat %s", one.size(), one == four ? "identical" : "DIFFER",
                   four == again ? "identical" : "DIFFER"));
    }

    progress("done", start);
    print_lines();
    std::printf("%d of 10 criteria failed\n", failures);
    return 0;
} catch (const std::exception& e) {
    print_lines();
    std::printf("acceptance run aborted: %s\n", e.what());
    return 1;
}
