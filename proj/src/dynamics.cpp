#include "symtop/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "parallel.hpp"
#include "propagator.hpp"
#include "symtop/error.hpp"
#include "symtop/units.hpp"

namespace symtop {

namespace {

constexpr double kNormTolerance = 1e-8;
constexpr std::size_t kResyncInterval = 512;

std::string member_label(const BasisState& s) {
    return "|J=" + std::to_string(s.J) + ",K=" + std::to_string(s.K) + ",M=" + std::to_string(s.M) + ">";
}

void require_increasing(std::span<const double> grid, const char* what) {
    if (grid.empty()) throw DomainError(std::string(what) + ": empty time grid");
    for (std::size_t i = 1; i < grid.size(); ++i) {
        if (!(grid[i] > grid[i - 1])) throw DomainError(std::string(what) + ": time grid must be strictly increasing");
    }
}

std::vector<double> transition_frequencies(const BlockOperators& block) {
    std::vector<double> omega(block.coupling.size());
    for (std::size_t r = 0; r < omega.size(); ++r) omega[r] = block.energies[r + 1] - block.energies[r];
    return omega;
}

void throw_drift(const BasisState& s, double drift, double step_fs) {
    char msg[200];
    std::snprintf(msg, sizeof msg, "norm drift %.3g exceeds %.1g for member %s; reduce dt below %.4g fs", drift,
                  kNormTolerance, member_label(s).c_str(), 0.5 * step_fs);
    throw StepSizeError(msg, 0.5 * step_fs);
}

// Observable and its time derivative (per atomic time unit) from the
// density band, with z_r = exp(-i w_r (t - t0)).
struct ObservablePair {
    double value = 0.0;
    double derivative_au = 0.0;
};

ObservablePair observe(const BlockOperators& block, const std::vector<double>& r_diag,
                       const std::vector<std::complex<double>>& r_off, const std::vector<double>& omega,
                       const std::vector<std::complex<double>>& z) {
    ObservablePair out;
    for (std::size_t r = 0; r < r_diag.size(); ++r) out.value += block.diagonal[r] * r_diag[r];
    for (std::size_t r = 0; r < r_off.size(); ++r) {
        const std::complex<double> term = block.coupling[r] * r_off[r] * z[r];
        out.value += 2.0 * term.real();
        // d/dt exp(-i w t) = -i w exp(-i w t)
        out.derivative_au += 2.0 * omega[r] * term.imag();
    }
    return out;
}

// Grid point inside the RK4 window. `partial_au` is zero when the point sits
// on node k, otherwise the distance past node k.
struct WindowPoint {
    std::size_t grid_index;
    int node;
    double partial_au;
};

struct BlockJob {
    int K;
    int M;
    std::size_t begin;  // member range
    std::size_t end;
};

struct BlockResult {
    std::vector<double> window_cos;
    std::vector<double> window_dcos_au;
    std::vector<double> final_diag;
    std::vector<std::complex<double>> final_off;
    double pre_value = 0.0;
    double final_constant = 0.0;
    double max_drift = 0.0;
};

struct Line {
    double omega_au;
    std::complex<double> amplitude;
};

BlockResult propagate_block(const MoleculeSpec& molecule, const PulseSpec& pulse, const detail::NodeGrid& grid,
                            const detail::PhaseTable& table, int j_max, const BlockJob& job,
                            std::span<const EnsembleMember> members, std::span<const WindowPoint> window,
                            double step_fs) {
    const BlockOperators block = build_block(molecule, job.K, job.M, j_max);
    const int n = static_cast<int>(block.size());
    const double dipole_au = units::to_atomic(molecule.dipole_debye, units::Quantity::dipole_debye);
    detail::BlockStepper stepper(block, dipole_au, pulse, grid, table,
                                 static_cast<std::size_t>(block.j_min - job.K));
    const std::vector<double> omega = transition_frequencies(block);

    std::vector<int> rows;
    std::vector<double> weights;
    rows.reserve(job.end - job.begin);
    weights.reserve(job.end - job.begin);
    BlockResult res;
    for (std::size_t i = job.begin; i < job.end; ++i) {
        const auto& m = members[i];
        rows.push_back(m.state.J - block.j_min);
        weights.push_back(m.weight * m.multiplicity);
        res.pre_value += weights.back() * block.diagonal[rows.back()];
    }
    // The global phase of each column drops out of the density, so columns
    // start as plain unit vectors.
    detail::ColumnSet cols(n, rows);
    detail::StepMatrix step;
    std::vector<double> r_diag(n);
    std::vector<std::complex<double>> r_off(n > 0 ? n - 1 : 0);
    std::vector<std::complex<double>> z;

    res.window_cos.assign(window.size(), 0.0);
    res.window_dcos_au.assign(window.size(), 0.0);

    auto record = [&](const detail::StepMatrix* partial, std::size_t slot, double t_au) {
        std::fill(r_diag.begin(), r_diag.end(), 0.0);
        std::fill(r_off.begin(), r_off.end(), std::complex<double>{});
        if (partial) {
            cols.accumulate_stepped_density(*partial, weights, r_diag, r_off);
        } else {
            cols.accumulate_density(weights, r_diag, r_off);
        }
        z.resize(omega.size());
        const double s = t_au - grid.t0_au;
        for (std::size_t r = 0; r < omega.size(); ++r) z[r] = std::polar(1.0, -omega[r] * s);
        const ObservablePair obs = observe(block, r_diag, r_off, omega, z);
        res.window_cos[slot] = obs.value;
        res.window_dcos_au[slot] = obs.derivative_au;
    };

    std::size_t wp = 0;
    for (int k = -grid.half_count; k <= grid.half_count; ++k) {
        for (; wp < window.size() && window[wp].node == k; ++wp) {
            if (window[wp].partial_au == 0.0) {
                record(nullptr, wp, grid.time_au(k));
            } else {
                stepper.partial_step(k, window[wp].partial_au, step);
                record(&step, wp, grid.time_au(k) + window[wp].partial_au);
            }
        }
        if (k < grid.half_count) {
            stepper.node_step(k, step);
            cols.apply(step);
        }
    }

    for (std::size_t c = 0; c < cols.columns(); ++c) {
        const double drift = std::abs(cols.norm2(c) - 1.0);
        res.max_drift = std::max(res.max_drift, drift);
        if (drift > kNormTolerance) throw_drift(members[job.begin + c].state, drift, step_fs);
    }
    res.final_diag.assign(n, 0.0);
    res.final_off.assign(r_off.size(), {});
    cols.accumulate_density(weights, res.final_diag, res.final_off);
    for (int r = 0; r < n; ++r) res.final_constant += block.diagonal[r] * res.final_diag[r];
    // Fold the coupling into the coherence so that it is ready to be summed as a line.
    for (std::size_t r = 0; r < res.final_off.size(); ++r) res.final_off[r] *= block.coupling[r];
    return res;
}

bool is_uniform(std::span<const double> t) {
    if (t.size() < 3) return true;
    const double dt = (t.back() - t.front()) / static_cast<double>(t.size() - 1);
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (std::abs(t[i] - (t.front() + static_cast<double>(i) * dt)) > 1e-9 * dt) return false;
    }
    return true;
}

// value(t) += 2 Re sum_l L_l exp(-i w_l (t - t0)), derivative (per ps) likewise.
void evaluate_lines(const std::vector<Line>& lines, double t0_ps, std::span<const double> t_ps,
                    std::span<double> value, std::span<double> derivative) {
    const std::size_t nl = lines.size();
    if (nl == 0 || t_ps.empty()) return;
    std::vector<double> w(nl), lr(nl), li(nl), dr(nl), di(nl), zr(nl), zi(nl), sr(nl), si(nl);
    for (std::size_t l = 0; l < nl; ++l) {
        w[l] = lines[l].omega_au / units::ps_per_au_time;  // rad/ps
        lr[l] = lines[l].amplitude.real();
        li[l] = lines[l].amplitude.imag();
        // -i w L
        dr[l] = w[l] * li[l];
        di[l] = -w[l] * lr[l];
    }
    const bool uniform = is_uniform(t_ps);
    const double dt = t_ps.size() > 1 ? (t_ps.back() - t_ps.front()) / static_cast<double>(t_ps.size() - 1) : 0.0;
    if (uniform) {
        for (std::size_t l = 0; l < nl; ++l) {
            sr[l] = std::cos(w[l] * dt);
            si[l] = -std::sin(w[l] * dt);
        }
    }
    for (std::size_t i = 0; i < t_ps.size(); ++i) {
        if (!uniform || i % kResyncInterval == 0) {
            const double s = t_ps[i] - t0_ps;
            for (std::size_t l = 0; l < nl; ++l) {
                zr[l] = std::cos(w[l] * s);
                zi[l] = -std::sin(w[l] * s);
            }
        }
        double v = 0.0, d = 0.0;
        for (std::size_t l = 0; l < nl; ++l) {
            v += lr[l] * zr[l] - li[l] * zi[l];
            d += dr[l] * zr[l] - di[l] * zi[l];
        }
        value[i] += 2.0 * v;
        derivative[i] += 2.0 * d;
        if (uniform) {
            for (std::size_t l = 0; l < nl; ++l) {
                const double nr = zr[l] * sr[l] - zi[l] * si[l];
                const double ni = zr[l] * si[l] + zi[l] * sr[l];
                zr[l] = nr;
                zi[l] = ni;
            }
        }
    }
}

}  // namespace

void RelaxationSpec::validate() const {
    if (!(T2_ps_atm > 0.0)) throw ConfigError("relaxation.T2 must be > 0");
    if (!(pressure_bar >= 0.0)) throw ConfigError("relaxation.pressure must be >= 0");
}

double RelaxationSpec::rate_per_ps() const { return units::bar_to_atm(pressure_bar) / T2_ps_atm; }

double BlockState::norm() const {
    double s = 0.0;
    for (const auto& a : amplitudes) s += std::norm(a);
    return std::sqrt(s);
}

Ensemble make_ensemble(const MoleculeSpec& molecule, const EnsembleSpec& spec) {
    molecule.validate();
    partition_function(molecule, spec);  // truncation check
    return Ensemble{spec, enumerate_members(molecule, spec)};
}

BlockState propagate_member(const EnsembleMember& member, const BlockOperators& block, const PulseSpec& pulse,
                            const MoleculeSpec& molecule, double dt_fs) {
    if (member.state.K != block.K || member.state.M != block.M) {
        throw DomainError("member " + member_label(member.state) + " does not belong to block K=" +
                          std::to_string(block.K) + ", M=" + std::to_string(block.M));
    }
    const std::size_t row = block.index_of(member.state.J);
    const detail::NodeGrid grid = detail::make_node_grid(pulse, dt_fs, PropagationOptions{}.min_steps);
    const std::vector<double> omega = transition_frequencies(block);
    const detail::PhaseTable table(omega, grid);
    const double dipole_au = units::to_atomic(molecule.dipole_debye, units::Quantity::dipole_debye);
    detail::BlockStepper stepper(block, dipole_au, pulse, grid, table, 0);

    const int n = static_cast<int>(block.size());
    const int start_row = static_cast<int>(row);
    detail::ColumnSet cols(n, std::span<const int>(&start_row, 1));
    // c(window start) = |J>, expressed in the interaction picture.
    const double t_start = units::ps_to_au(pulse.window_start_ps());
    const double t_end = units::ps_to_au(pulse.window_end_ps());
    std::vector<std::complex<double>> init(n);
    init[row] = std::polar(1.0, block.energies[row] * (t_start - grid.t0_au));
    cols.set_column(0, init);

    detail::StepMatrix step;
    for (int k = -grid.half_count; k < grid.half_count; ++k) {
        stepper.node_step(k, step);
        cols.apply(step);
    }
    const double drift = std::abs(cols.norm2(0) - 1.0);
    if (drift > kNormTolerance) throw_drift(member.state, drift, units::au_to_ps(grid.h_au) * 1e3);

    BlockState state{std::cref(block), std::vector<std::complex<double>>(n), pulse.window_end_ps()};
    for (int r = 0; r < n; ++r) {
        state.amplitudes[r] = std::polar(1.0, -block.energies[r] * (t_end - grid.t0_au)) * cols.get(0, r);
    }
    return state;
}

MemberSamples free_evolution_trace(const BlockState& state, const BlockOperators& block,
                                   std::span<const double> grid_ps) {
    require_increasing(grid_ps, "free_evolution_trace");
    if (grid_ps.front() < state.time_ps - 1e-12) {
        throw DomainError("free_evolution_trace: grid starts before the end of the pulse");
    }
    if (state.amplitudes.size() != block.size()) throw DomainError("free_evolution_trace: state/block size mismatch");
    const auto& c = state.amplitudes;
    double diag = 0.0;
    for (std::size_t r = 0; r < c.size(); ++r) diag += block.diagonal[r] * std::norm(c[r]);
    std::vector<Line> lines;
    for (std::size_t r = 0; r + 1 < c.size(); ++r) {
        lines.push_back({block.energies[r + 1] - block.energies[r], block.coupling[r] * std::conj(c[r]) * c[r + 1]});
    }
    MemberSamples out;
    out.cos_theta.assign(grid_ps.size(), diag);
    out.dcos_dt_per_ps.assign(grid_ps.size(), 0.0);
    evaluate_lines(lines, state.time_ps, grid_ps, out.cos_theta, out.dcos_dt_per_ps);
    return out;
}

OrientationTrace ensemble_orientation(const MoleculeSpec& molecule, const Ensemble& ensemble, const PulseSpec& pulse,
                                      const RelaxationSpec& relaxation, std::span<const double> grid_ps,
                                      const PropagationOptions& options) {
    molecule.validate();
    pulse.validate();
    relaxation.validate();
    ensemble.spec.validate();
    require_increasing(grid_ps, "ensemble_orientation");
    const int j_max = ensemble.spec.j_max;
    const std::span<const EnsembleMember> members = ensemble.members;

    // Blocks in canonical (K, M) order.
    std::vector<BlockJob> jobs;
    for (std::size_t i = 0; i < members.size(); ++i) {
        const auto& s = members[i].state;
        if (s.K < 0 || s.J > j_max || std::abs(s.K) > s.J || std::abs(s.M) > s.J) {
            throw DomainError("ensemble member " + member_label(s) + " outside the basis");
        }
        if (jobs.empty() || jobs.back().K != s.K || jobs.back().M != s.M) {
            if (!jobs.empty() && (s.K < jobs.back().K || (s.K == jobs.back().K && s.M < jobs.back().M))) {
                throw DomainError("ensemble members are not in canonical (K, M, J) order");
            }
            jobs.push_back({s.K, s.M, i, i + 1});
        } else {
            jobs.back().end = i + 1;
        }
    }

    const detail::NodeGrid grid = detail::make_node_grid(pulse, options.dt_fs, options.min_steps);
    const double step_fs = units::au_to_ps(grid.h_au) * 1e3;
    const double t0 = pulse.t0_ps;
    const double t_a = units::au_to_ps(grid.start_au());
    const double t_b = units::au_to_ps(grid.end_au());
    const double h_ps = units::au_to_ps(grid.h_au);
    const double eps = 1e-9 * h_ps;

    std::vector<WindowPoint> window;
    std::size_t first_post = grid_ps.size();
    std::size_t first_window = grid_ps.size();
    for (std::size_t i = 0; i < grid_ps.size(); ++i) {
        const double t = grid_ps[i];
        if (t < t_a - eps) continue;
        if (t > t_b + eps) {
            first_post = i;
            break;
        }
        first_window = std::min(first_window, i);
        const double x = (t - t0) / h_ps;
        int k = static_cast<int>(std::lround(x));
        double partial = 0.0;
        if (std::abs(x - k) * h_ps > eps) {
            k = static_cast<int>(std::floor(x));
            partial = units::ps_to_au(t) - grid.time_au(k);
        }
        k = std::clamp(k, -grid.half_count, grid.half_count);
        window.push_back({i, k, partial});
    }
    const std::size_t n_pre = std::min(first_window, first_post);

    double pre_total = 0.0;
    double post_constant = 0.0;
    double max_drift = 0.0;
    std::vector<double> window_cos(window.size(), 0.0);
    std::vector<double> window_dcos(window.size(), 0.0);
    std::vector<Line> lines;

    for (std::size_t g0 = 0; g0 < jobs.size();) {
        const int K = jobs[g0].K;
        std::size_t g1 = g0;
        while (g1 < jobs.size() && jobs[g1].K == K) ++g1;

        std::vector<double> omega_k;
        for (int J = K; J < j_max; ++J) {
            omega_k.push_back(units::wavenumber_to_au(energy(molecule.constants, J + 1, K) -
                                                      energy(molecule.constants, J, K)));
        }
        const detail::PhaseTable table(omega_k, grid);
        std::vector<BlockResult> results(g1 - g0);
        detail::parallel_for(results.size(), options.threads, [&](std::size_t b) {
            results[b] = propagate_block(molecule, pulse, grid, table, j_max, jobs[g0 + b], members, window, step_fs);
        });

        std::vector<std::complex<double>> line_k(omega_k.size());
        for (std::size_t b = 0; b < results.size(); ++b) {
            const auto& r = results[b];
            pre_total += r.pre_value;
            post_constant += r.final_constant;
            max_drift = std::max(max_drift, r.max_drift);
            for (std::size_t i = 0; i < window.size(); ++i) {
                window_cos[i] += r.window_cos[i];
                window_dcos[i] += r.window_dcos_au[i];
            }
            const std::size_t offset = static_cast<std::size_t>(std::max(K, std::abs(jobs[g0 + b].M)) - K);
            for (std::size_t j = 0; j < r.final_off.size(); ++j) line_k[offset + j] += r.final_off[j];
        }
        for (std::size_t j = 0; j < omega_k.size(); ++j) {
            if (line_k[j] != 0.0) lines.push_back({omega_k[j], line_k[j]});
        }
        g0 = g1;
    }

    OrientationTrace trace;
    trace.time_ps.assign(grid_ps.begin(), grid_ps.end());
    trace.cos_theta.assign(grid_ps.size(), 0.0);
    trace.dcos_dt_per_ps.assign(grid_ps.size(), 0.0);
    for (std::size_t i = 0; i < n_pre; ++i) trace.cos_theta[i] = pre_total;
    for (std::size_t i = 0; i < window.size(); ++i) {
        trace.cos_theta[window[i].grid_index] = window_cos[i];
        trace.dcos_dt_per_ps[window[i].grid_index] = window_dcos[i] / units::ps_per_au_time;
    }
    if (first_post < grid_ps.size()) {
        std::span<double> v(trace.cos_theta.data() + first_post, grid_ps.size() - first_post);
        std::span<double> d(trace.dcos_dt_per_ps.data() + first_post, grid_ps.size() - first_post);
        std::fill(v.begin(), v.end(), post_constant);
        evaluate_lines(lines, t0, grid_ps.subspan(first_post), v, d);
    }

    auto& diag = trace.diagnostics;
    diag.max_norm_drift = max_drift;
    diag.members = members.size();
    diag.blocks = jobs.size();
    diag.steps = static_cast<std::size_t>(grid.steps());
    diag.step_fs = step_fs;
    diag.window_start_ps = t_a;
    diag.window_end_ps = t_b;

    if (relaxation.pressure_bar > 0.0) return apply_relaxation(trace, relaxation, t0);
    return trace;
}

OrientationTrace apply_relaxation(const OrientationTrace& undamped, const RelaxationSpec& relaxation, double t0_ps) {
    relaxation.validate();
    OrientationTrace out = undamped;
    const double rate = relaxation.rate_per_ps();
    if (rate == 0.0) return out;
    for (std::size_t i = 0; i < out.time_ps.size(); ++i) {
        const double decay = std::exp(-(out.time_ps[i] - t0_ps) * rate);
        const double f = undamped.cos_theta[i];
        out.cos_theta[i] = f * decay;
        if (undamped.has_derivative()) out.dcos_dt_per_ps[i] = (undamped.dcos_dt_per_ps[i] - rate * f) * decay;
    }
    return out;
}

}  // namespace symtop
