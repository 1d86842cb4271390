#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "symtop/dynamics.hpp"
#include "symtop/pulse.hpp"

// Free-induction decay: the THz field re-emitted by the oriented gas,
// E(t) = E0(t) - alpha d<cos(theta)>/dt at first order in optical depth.

namespace symtop {

struct FidSpec {
    double alpha_kV_per_cm_ps = 1.0;
    bool include_incident = false;

    void validate() const;
};

struct Signal {
    std::vector<double> time_ps;
    std::vector<double> values;  // kV/cm, or detector units after fitting
};

/// Requires a derivative channel; `pulse` is needed only with include_incident.
Signal fid_signal(const OrientationTrace& trace, const FidSpec& spec, const std::optional<PulseSpec>& pulse = {});

struct SpectralCheckReport {
    double max_deviation = 0.0;
    std::size_t samples = 0;
    double dt_ps = 0.0;
    std::size_t retained_bins = 0;
    double peak = 0.0;
    double endpoint_ratio = 0.0;  // max(|f(first)|, |f(last)|) / peak
};

/// Compares the DFT of the derivative channel with -i w times the DFT of
/// <cos(theta)> (transform kernel exp(+i w t)) over all bins up to Nyquist,
/// normalised by max |w F[f]|. The grid must be uniform and the trace decayed
/// to below 1e-6 of its peak at both ends.
SpectralCheckReport spectral_derivative_check(const OrientationTrace& trace);

/// Rigid-rotor echo period 1/(2 c B) in ps.
double echo_spacing(const MoleculeSpec& molecule);

/// alpha = x N mu / (2 c eps0 V) with the ideal-gas density, in kV cm^-1 ps.
double alpha_from_conditions(double path_cm, double pressure_bar, double temperature_K, double dipole_debye);

}  // namespace symtop
