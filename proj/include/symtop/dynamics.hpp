#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "symtop/pulse.hpp"
#include "symtop/rotor.hpp"
#include "symtop/thermal.hpp"

// Orientation dynamics of a thermal symmetric-top ensemble.
//
// rho(0) is diagonal in |J,K,M>, so the Liouville-von Neumann evolution is a
// weighted sum of pure-state evolutions. Each pure state is integrated with
// classical RK4 across the pulse window and evolved analytically afterwards.

namespace symtop {

/// Collisional dephasing, cos(theta)(t) -> cos(theta)(t) exp(-(t - t0) P / T2).
struct RelaxationSpec {
    double T2_ps_atm = 23.0;
    double pressure_bar = 0.35;  // 0 disables relaxation

    void validate() const;
    double rate_per_ps() const;
};

struct PropagationOptions {
    /// Upper bound on the RK4 step inside the pulse window. The step is
    /// shortened so that at least `min_steps` steps cover the window.
    double dt_fs = 10.0;
    int min_steps = 200;
    unsigned threads = 0;  // 0 = hardware concurrency
};

/// Amplitudes of one (K,M) block in the Schroedinger picture at `time_ps`.
struct BlockState {
    std::reference_wrapper<const BlockOperators> block;
    std::vector<std::complex<double>> amplitudes;
    double time_ps = 0.0;

    double norm() const;
};

struct MemberSamples {
    std::vector<double> cos_theta;
    std::vector<double> dcos_dt_per_ps;
};

struct PropagationDiagnostics {
    double max_norm_drift = 0.0;
    std::size_t members = 0;
    std::size_t blocks = 0;
    std::size_t steps = 0;  // RK4 steps across the window, per member
    double step_fs = 0.0;
    double window_start_ps = 0.0;
    double window_end_ps = 0.0;
};

struct OrientationTrace {
    std::vector<double> time_ps;
    std::vector<double> cos_theta;
    std::vector<double> dcos_dt_per_ps;
    PropagationDiagnostics diagnostics;

    bool has_derivative() const { return !dcos_dt_per_ps.empty() && dcos_dt_per_ps.size() == time_ps.size(); }
};

struct Ensemble {
    EnsembleSpec spec;
    std::vector<EnsembleMember> members;  // canonical (K, M, J) order
};

Ensemble make_ensemble(const MoleculeSpec& molecule, const EnsembleSpec& spec);

/// Integrates one member from the window start (eigenstate |member.J>) to the
/// window end. Throws StepSizeError when the norm drifts by more than 1e-8.
BlockState propagate_member(const EnsembleMember& member, const BlockOperators& block, const PulseSpec& pulse,
                            const MoleculeSpec& molecule, double dt_fs);

/// Field-free <cos(theta)>(t) of one state and its exact time derivative, for
/// grid times at or after state.time_ps.
MemberSamples free_evolution_trace(const BlockState& state, const BlockOperators& block,
                                   std::span<const double> grid_ps);

/// Ensemble-averaged orientation on `grid_ps`, relaxation included.
OrientationTrace ensemble_orientation(const MoleculeSpec& molecule, const Ensemble& ensemble,
                                      const PulseSpec& pulse, const RelaxationSpec& relaxation,
                                      std::span<const double> grid_ps, const PropagationOptions& options = {});

/// Multiplies an undamped trace by exp(-(t - t0) P / T2), derivative by the product rule.
OrientationTrace apply_relaxation(const OrientationTrace& undamped, const RelaxationSpec& relaxation, double t0_ps);

}  // namespace symtop
