#pragma once

#include <span>
#include <vector>

// Single-cycle THz pulse built from Hermite functions:
//
//   E(t) = (E1/2) exp(-u^2/2) [ -3 D3 H2(u) + D1 H0(u) ],   u = (t - t0)/sigma
//
// with D_n = (2^n n! sqrt(pi))^(-1/2), H2(u) = 4u^2 - 2, H0 = 1 and
// 16 ln(2) sigma^2 = tau^2. The field is exactly zero for |u| > support_half_width.

namespace symtop {

struct PulseSpec {
    double E1_kV_per_cm = 100.0;
    double tau_ps = 1.0;
    double t0_ps = 0.0;
    double support_half_width = 6.0;  // in units of sigma

    void validate() const;
    double sigma_ps() const;
    double window_start_ps() const { return t0_ps - support_half_width * sigma_ps(); }
    double window_end_ps() const { return t0_ps + support_half_width * sigma_ps(); }
};

double sigma_from_tau(double tau_ps);

/// Field in kV/cm at time t (ps).
double field_at(const PulseSpec& spec, double t_ps);

/// Analytic peak-to-peak amplitude of the pulse shape for E1 = 1.
double peak_to_peak_per_unit_amplitude();

/// E1 that gives the requested peak-to-peak amplitude (kV/cm).
double amplitude_for_peak_to_peak(double peak_to_peak_kV_per_cm);

struct PulseSamples {
    std::vector<double> time_ps;
    std::vector<double> field_kV_per_cm;
    double peak_to_peak = 0.0;          // of the pulse itself, grid independent
    double sampled_peak_to_peak = 0.0;  // max - min over the samples
};

/// Samples the pulse on a strictly increasing grid.
PulseSamples sample(const PulseSpec& spec, std::span<const double> grid_ps);

}  // namespace symtop
