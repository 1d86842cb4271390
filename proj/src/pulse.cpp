#include "symtop/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "symtop/error.hpp"

namespace symtop {

namespace {

// D_n = (2^n n! sqrt(pi))^(-1/2)
const double kD1 = 1.0 / std::sqrt(2.0 * std::sqrt(std::numbers::pi));
const double kD3 = 1.0 / std::sqrt(48.0 * std::sqrt(std::numbers::pi));

// Shape for E1 = 1 as a function of the reduced time u.
double shape(double u) {
    const double h2 = 4.0 * u * u - 2.0;
    return 0.5 * std::exp(-0.5 * u * u) * (-3.0 * kD3 * h2 + kD1);
}

}  // namespace

void PulseSpec::validate() const {
    if (!(tau_ps > 0.0)) throw ConfigError("pulse.tau must be > 0");
    if (!std::isfinite(E1_kV_per_cm)) throw ConfigError("pulse.E1 must be finite");
    if (!std::isfinite(t0_ps)) throw ConfigError("pulse.t0 must be finite");
    if (!(support_half_width >= 5.0)) throw ConfigError("pulse.support_half_width must be >= 5");
}

double PulseSpec::sigma_ps() const { return sigma_from_tau(tau_ps); }

double sigma_from_tau(double tau_ps) {
    if (!(tau_ps > 0.0)) throw DomainError("sigma_from_tau: tau must be > 0");
    return tau_ps / std::sqrt(16.0 * std::numbers::ln2);
}

double field_at(const PulseSpec& spec, double t_ps) {
    const double u = (t_ps - spec.t0_ps) / spec.sigma_ps();
    if (std::abs(u) > spec.support_half_width) return 0.0;
    return spec.E1_kV_per_cm * shape(u);
}

double peak_to_peak_per_unit_amplitude() {
    // shape(u) = exp(-u^2/2)(a - b u^2)/2 has its maximum at u = 0 and its
    // minima at u^2 = (a + 2b)/b, where it equals -b exp(-(a+2b)/(2b)).
    const double a = 6.0 * kD3 + kD1;
    const double b = 12.0 * kD3;
    return 0.5 * a + b * std::exp(-(a + 2.0 * b) / (2.0 * b));
}

double amplitude_for_peak_to_peak(double peak_to_peak_kV_per_cm) {
    return peak_to_peak_kV_per_cm / peak_to_peak_per_unit_amplitude();
}

PulseSamples sample(const PulseSpec& spec, std::span<const double> grid_ps) {
    if (grid_ps.empty()) throw DomainError("pulse sample: empty time grid");
    for (std::size_t i = 1; i < grid_ps.size(); ++i) {
        if (!(grid_ps[i] > grid_ps[i - 1])) throw DomainError("pulse sample: grid must be strictly increasing");
    }
    PulseSamples out;
    out.time_ps.assign(grid_ps.begin(), grid_ps.end());
    out.field_kV_per_cm.reserve(grid_ps.size());
    for (double t : grid_ps) out.field_kV_per_cm.push_back(field_at(spec, t));
    const auto [lo, hi] = std::minmax_element(out.field_kV_per_cm.begin(), out.field_kV_per_cm.end());
    out.sampled_peak_to_peak = *hi - *lo;
    out.peak_to_peak = std::abs(spec.E1_kV_per_cm) * peak_to_peak_per_unit_amplitude();
    return out;
}

}  // namespace symtop
