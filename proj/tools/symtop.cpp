// symtop: simulate, scan, fit and check from the command line.
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid input.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "oracles.hpp"
#include "symtop/error.hpp"
#include "symtop/experiments.hpp"
#include "symtop/io.hpp"
#include "symtop/thermal.hpp"
#include "symtop/version.hpp"

namespace fs = std::filesystem;
using namespace symtop;

namespace {

constexpr const char* kManifest = "manifest.json";

struct Common {
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    std::vector<std::string> overrides;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config_path, "Config file (section.key = value lines)")->check(CLI::ExistingFile);
    app->add_option("--out", c.out_dir, "Output directory (overrides output.dir)");
    app->add_option("--threads", c.threads, "Worker threads, 0 = all cores");
    app->add_option("--set", c.overrides, "Override one setting, key=value (repeatable)")->take_all();
}

SimulationConfig resolve(const Common& c) {
    SimulationConfig cfg = c.config_path.empty() ? SimulationConfig{} : io::load_config(c.config_path);
    for (const auto& o : c.overrides) io::apply_override(cfg, o);
    if (!c.out_dir.empty()) cfg.output_dir = c.out_dir;
    cfg.propagation.threads = c.threads;
    cfg.validate();
    return cfg;
}

void write_manifest(const SimulationConfig& cfg, const char* command, const std::vector<std::string>& outputs) {
    io::write_text(fs::path(cfg.output_dir) / kManifest, io::manifest_json(cfg, command, outputs));
}

int cmd_simulate(const Common& common) {
    const SimulationConfig cfg = resolve(common);
    const auto run = run_simulation(cfg);
    const fs::path out(cfg.output_dir);
    io::write_text(out / "trace.csv", io::trace_csv(run.trace, kManifest));
    io::write_text(out / "fid.csv", io::signal_csv(run.fid, "fid_kV_per_cm", kManifest));
    write_manifest(cfg, "simulate", {"trace.csv", "fid.csv"});
    const auto& d = run.trace.diagnostics;
    std::printf("members %zu, RK4 steps %zu of %.4g fs, max norm drift %.2e\n", d.members, d.steps, d.step_fs,
                d.max_norm_drift);
    std::printf("wrote %s/{trace.csv,fid.csv,%s}\n", cfg.output_dir.c_str(), kManifest);
    return 0;
}

std::vector<double> scan_values(const std::vector<double>& listed, std::optional<double> from, std::optional<double> to,
                                std::optional<double> step) {
    if (!listed.empty()) {
        if (from || to || step) throw ConfigError("give either --values or --from/--to/--step, not both");
        return listed;
    }
    if (!from && !to && !step) throw ConfigError("scan needs --values or --from/--to/--step");
    if (!from || !to || !step) throw ConfigError("--from, --to and --step must be given together");
    if (!(*step > 0.0) || !(*to >= *from)) throw ConfigError("scan range needs step > 0 and to >= from");
    std::vector<double> v;
    const auto n = static_cast<long>(std::floor((*to - *from) / *step + 1e-9));
    for (long i = 0; i <= n; ++i) v.push_back(*from + static_cast<double>(i) * *step);
    return v;
}

int cmd_scan(const Common& common, const std::string& parameter, const std::vector<double>& values,
             bool derivative) {
    const SimulationConfig cfg = resolve(common);
    ScanOptions opt;
    opt.use_derivative = derivative;
    opt.progress = [&](std::size_t i, double v) {
        std::fprintf(stderr, "[%zu/%zu] %s = %g\n", i + 1, values.size(), parameter.c_str(), v);
    };
    const ScanResult r = parameter == "amplitude" ? scan_amplitude(cfg, values, opt) : scan_tau(cfg, values, opt);
    const std::string name = "scan_" + parameter + ".json";
    io::write_text(fs::path(cfg.output_dir) / name, io::scan_json(r, kManifest));
    write_manifest(cfg, "scan", {name});
    const char* unit = parameter == "amplitude" ? "kV/cm" : "ps";
    for (Channel c : kChannels) {
        const auto& ch = r.channel(c);
        std::printf("%-15s argmax %g %s", to_string(c), ch.argmax, unit);
        if (ch.r_squared) std::printf(", R^2 through origin %.6f", *ch.r_squared);
        std::printf("\n");
    }
    std::printf("wrote %s/%s\n", cfg.output_dir.c_str(), name.c_str());
    return 0;
}

int cmd_fit(const Common& common, const std::string& data_path, const FitOptions& fit_opt) {
    const SimulationConfig cfg = resolve(common);
    const Signal data = io::read_signal_csv(data_path);
    const auto run = run_simulation(cfg);
    const FitResult fit = fit_trace(run.fid, data, fit_opt);
    const Overlap o = overlap(run.fid, data, fit.time_shift_ps);
    double ss = 0.0;
    for (double v : o.data) ss += v * v;
    const double data_rms = o.data.empty() ? 0.0 : std::sqrt(ss / static_cast<double>(o.data.size()));
    const double relative = data_rms > 0.0 ? fit.residual_rms / data_rms : 0.0;
    const fs::path out(cfg.output_dir);
    io::write_text(out / "fit.json", io::fit_json(fit, relative, data_path, kManifest));
    io::write_text(out / "overlay.csv", io::overlay_csv(o, fit, kManifest));
    io::write_text(out / "fid.csv", io::signal_csv(run.fid, "fid_kV_per_cm", kManifest));
    write_manifest(cfg, "fit", {"fit.json", "overlay.csv", "fid.csv"});
    std::printf("scale %.6g data units per kV/cm, offset %.6g data units, time shift %.4f ps\n", fit.scale, fit.offset,
                fit.time_shift_ps);
    std::printf("residual rms %.4g data units (%.1f%% of data rms) over %zu samples\n", fit.residual_rms,
                100.0 * relative, fit.samples);
    std::printf("wrote %s/{fit.json,overlay.csv,fid.csv,%s}\n", cfg.output_dir.c_str(), kManifest);
    return 0;
}

// ---------------------------------------------------------------------------
// check

struct CheckLine {
    std::string name;
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

CheckLine check_elements() {
    double worst = 0.0;
    for (int J = 0; J <= 8; ++J) {
        for (int K = -J; K <= J; ++K) {
            for (int M = -J; M <= J; ++M) {
                worst = std::max(worst, std::abs(cos_theta_diagonal(J, K, M) - oracle::cos_element_3j(J, J, K, M)));
                if (J < 8) {
                    worst = std::max(worst,
                                     std::abs(cos_theta_coupling(J, K, M) - oracle::cos_element_3j(J + 1, J, K, M)));
                }
            }
        }
    }
    return {"matrix elements", worst <= 1e-12, fmt("J <= 8 vs 3j oracle, max deviation %.2e (<= 1e-12)", worst)};
}

CheckLine check_truncation(const SimulationConfig& cfg) {
    const auto& e = cfg.ensemble;
    const int need = required_j_max(cfg.molecule, e.temperature_K, e.truncation_tolerance);
    const bool ok = need >= 0 && need <= e.j_max;
    std::string detail = fmt("J_max %d, tolerance %.1e: ", e.j_max, e.truncation_tolerance);
    detail += need < 0 ? std::string("not converged below J = 250")
                       : fmt("requires J_max >= %d%s", need, ok ? "" : ", raise ensemble.J_max");
    return {"partition truncation", ok, detail};
}

CheckLine check_rk4(const SimulationConfig& cfg, const Ensemble& ens) {
    // Lowest state, most populated state and highest retained J.
    std::vector<const EnsembleMember*> picks{&ens.members.front()};
    picks.push_back(&*std::max_element(ens.members.begin(), ens.members.end(),
                                       [](const auto& a, const auto& b) { return a.weight < b.weight; }));
    picks.push_back(&*std::max_element(ens.members.begin(), ens.members.end(),
                                       [](const auto& a, const auto& b) { return a.state.J < b.state.J; }));
    double worst = 0.0, drift = 0.0;
    for (const EnsembleMember* m : picks) {
        const auto block = build_block(cfg.molecule, m->state.K, m->state.M, cfg.ensemble.j_max);
        const auto a = propagate_member(*m, block, cfg.pulse, cfg.molecule, cfg.propagation.dt_fs);
        const auto b = propagate_member(*m, block, cfg.pulse, cfg.molecule, cfg.propagation.dt_fs / 2.0);
        for (std::size_t i = 0; i < a.amplitudes.size(); ++i) {
            worst = std::max(worst, std::abs(a.amplitudes[i] - b.amplitudes[i]));
        }
        drift = std::max({drift, std::abs(a.norm() - 1.0), std::abs(b.norm() - 1.0)});
    }
    const bool ok = worst <= 1e-8 && drift <= 1e-10;
    return {"RK4 convergence", ok,
            fmt("dt %.4g vs %.4g fs: max amplitude change %.2e (<= 1e-8), norm drift %.2e (<= 1e-10)",
                cfg.propagation.dt_fs, cfg.propagation.dt_fs / 2.0, worst, drift)};
}

// Spectral identity and revival spacing on one decaying ensemble trace.
std::vector<CheckLine> check_trace(const SimulationConfig& cfg, const Ensemble& ens) {
    std::vector<CheckLine> lines;
    const double period = echo_spacing(cfg.molecule);
    const double rate = cfg.relaxation.rate_per_ps();
    const bool rigid = cfg.molecule.constants.D_J == 0.0 && cfg.molecule.constants.D_JK == 0.0 &&
                       cfg.molecule.constants.D_K == 0.0;
    GridSpec g;
    g.t_start_ps = cfg.pulse.window_start_ps() - 2.0;
    // A whole number of samples per period, so shifted samples line up.
    const auto per_period = static_cast<std::size_t>(std::ceil(period / 0.002));
    g.dt_ps = period / static_cast<double>(per_period);
    g.t_end_ps = rate > 0.0 ? cfg.pulse.t0_ps + std::max(20.0 / rate, 2.5 * period) : cfg.pulse.t0_ps + 2.5 * period;
    const auto trace = ensemble_orientation(cfg.molecule, ens, cfg.pulse, cfg.relaxation, g.times(), cfg.propagation);

    if (rate > 0.0) {
        const auto r = spectral_derivative_check(trace);
        io::write_text(fs::path(cfg.output_dir) / "spectral_check.json", io::spectral_json(r, kManifest));
        lines.push_back({"spectral identity", r.max_deviation < 1e-6,
                         fmt("%zu samples at %.3g ps, deviation %.2e (< 1e-6)", r.samples, r.dt_ps, r.max_deviation)});
    } else {
        lines.push_back({"spectral identity", true, "skipped: relaxation.pressure = 0, trace does not decay"});
    }

    const auto rev = detect_revivals(trace.time_ps, trace.cos_theta, period, 2, cfg.pulse.t0_ps);
    const double spacing = rev[1].time_ps - rev[0].time_ps;
    bool ok = rev[0].found && rev[1].found && std::abs(spacing - period) <= 1.5;
    std::string detail =
        fmt("revivals at %.3f and %.3f ps, spacing %.3f ps vs echo period %.3f ps (within 1.5 ps)", rev[0].time_ps,
            rev[1].time_ps, spacing, period);
    if (rigid) {
        // Every transition frequency is a multiple of 1/period, so after the
        // pulse the undamped trace repeats exactly.
        const double decay = std::exp(-rate * period);
        double worst = 0.0, peak = 0.0;
        for (std::size_t i = 0; i + per_period < trace.time_ps.size(); ++i) {
            if (trace.time_ps[i] < cfg.pulse.window_end_ps()) continue;
            worst = std::max(worst, std::abs(trace.cos_theta[i + per_period] - decay * trace.cos_theta[i]));
            peak = std::max(peak, std::abs(trace.cos_theta[i]));
        }
        const double rel = peak > 0.0 ? worst / peak : 0.0;
        ok = ok && rel <= 1e-9;
        detail += fmt("; rigid rotor repeats after one period to %.2e of peak (<= 1e-9)", rel);
    }
    lines.push_back({"revival spacing", ok, detail});
    return lines;
}

int cmd_check(const Common& common) {
    const SimulationConfig cfg = resolve(common);
    std::vector<CheckLine> lines{check_elements(), check_truncation(cfg)};
    if (lines.back().pass) {
        const Ensemble ens = make_ensemble(cfg.molecule, cfg.ensemble);
        lines.push_back(check_rk4(cfg, ens));
        for (auto& l : check_trace(cfg, ens)) lines.push_back(std::move(l));
    } else {
        lines.push_back({"RK4 convergence", false, "not run: ensemble truncation failed"});
        lines.push_back({"spectral identity", false, "not run: ensemble truncation failed"});
        lines.push_back({"revival spacing", false, "not run: ensemble truncation failed"});
    }
    bool all = true;
    for (const auto& l : lines) {
        std::printf("%s  %-20s %s\n", l.pass ? "PASS" : "FAIL", l.name.c_str(), l.detail.c_str());
        all = all && l.pass;
    }
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"THz-driven orientation and free-induction decay of a symmetric-top gas"};
    app.set_version_flag("--version", std::string(kVersion));
    app.require_subcommand(1);

    Common common;
    auto* sim = app.add_subcommand("simulate", "Ensemble orientation trace and FID");
    add_common(sim, common);

    std::string parameter;
    std::vector<double> listed;
    std::optional<double> from, to, step;
    bool derivative = false;
    auto* scan = app.add_subcommand("scan", "Peak orientation versus pulse amplitude or duration");
    add_common(scan, common);
    scan->add_option("parameter", parameter, "amplitude (kV/cm) or tau (ps)")
        ->required()
        ->check(CLI::IsMember({"amplitude", "tau"}));
    scan->add_option("--values", listed, "Comma-separated parameter values")->delimiter(',');
    scan->add_option("--from", from, "First value");
    scan->add_option("--to", to, "Last value (inclusive)");
    scan->add_option("--step", step, "Step");
    scan->add_flag("--derivative", derivative, "Scan |d<cos>/dt| instead of |<cos>|");

    std::string data_path;
    FitOptions fit_opt;
    auto* fit = app.add_subcommand("fit", "Fit the model FID to a measured trace");
    add_common(fit, common);
    fit->add_option("--data", data_path, "CSV with time_ps and signal columns")->required();
    fit->add_flag("--time-shift", fit_opt.time_shift, "Also fit a time offset");
    fit->add_option("--max-shift", fit_opt.max_shift_ps, "Largest time offset searched, ps");

    auto* check = app.add_subcommand("check", "Run the numerical self-checks");
    add_common(check, common);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (sim->parsed()) return cmd_simulate(common);
        if (scan->parsed()) return cmd_scan(common, parameter, scan_values(listed, from, to, step), derivative);
        if (fit->parsed()) return cmd_fit(common, data_path, fit_opt);
        if (check->parsed()) return cmd_check(common);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const TruncationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const StepSizeError& e) {
        std::cerr << "error: " << e.what() << " (try propagation.dt_fs = " << e.suggested_dt_fs() << ")\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
