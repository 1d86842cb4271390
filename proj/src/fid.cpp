#include "symtop/fid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <memory>
#include <mutex>
#include <numbers>

#include "symtop/error.hpp"
#include "symtop/units.hpp"

namespace symtop {

namespace {

// Planner calls are not thread-safe in FFTW.
std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

struct FftwFree {
    void operator()(void* p) const { fftw_free(p); }
};

// Conjugated r2c output: sum_n x_n exp(+2 pi i k n / N), k = 0..N/2.
std::vector<std::complex<double>> forward_plus(const std::vector<double>& x) {
    const int n = static_cast<int>(x.size());
    const int bins = n / 2 + 1;
    std::unique_ptr<double, FftwFree> in(static_cast<double*>(fftw_malloc(sizeof(double) * n)));
    std::unique_ptr<fftw_complex, FftwFree> out(
        static_cast<fftw_complex*>(fftw_malloc(sizeof(fftw_complex) * bins)));
    if (!in || !out) throw std::bad_alloc();
    fftw_plan plan;
    {
        std::lock_guard lock(planner_mutex());
        plan = fftw_plan_dft_r2c_1d(n, in.get(), out.get(), FFTW_ESTIMATE);
    }
    std::copy(x.begin(), x.end(), in.get());
    fftw_execute(plan);
    std::vector<std::complex<double>> result(bins);
    for (int k = 0; k < bins; ++k) result[k] = {out.get()[k][0], -out.get()[k][1]};
    {
        std::lock_guard lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
    return result;
}

}  // namespace

void FidSpec::validate() const {
    if (!(alpha_kV_per_cm_ps >= 0.0) || !std::isfinite(alpha_kV_per_cm_ps)) throw ConfigError("fid.alpha must be >= 0");
}

Signal fid_signal(const OrientationTrace& trace, const FidSpec& spec, const std::optional<PulseSpec>& pulse) {
    spec.validate();
    if (!trace.has_derivative()) throw DomainError("fid_signal: trace has no derivative channel");
    Signal s;
    s.time_ps = trace.time_ps;
    s.values.resize(trace.time_ps.size());
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] = -spec.alpha_kV_per_cm_ps * trace.dcos_dt_per_ps[i];
    if (spec.include_incident) {
        if (!pulse) throw DomainError("fid_signal: include_incident needs a pulse");
        pulse->validate();
        for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] += field_at(*pulse, s.time_ps[i]);
    }
    return s;
}

SpectralCheckReport spectral_derivative_check(const OrientationTrace& trace) {
    if (!trace.has_derivative()) throw DomainError("spectral_derivative_check: trace has no derivative channel");
    const auto& t = trace.time_ps;
    const std::size_t n = t.size();
    if (n < 4) throw DomainError("spectral_derivative_check: need at least 4 samples");
    const double dt = (t.back() - t.front()) / static_cast<double>(n - 1);
    if (!(dt > 0.0)) throw DomainError("spectral_derivative_check: grid must be increasing");
    for (std::size_t i = 0; i < n; ++i) {
        if (std::abs(t[i] - (t.front() + static_cast<double>(i) * dt)) > 1e-6 * dt) {
            throw DomainError("spectral_derivative_check: grid is not uniform");
        }
    }
    SpectralCheckReport report;
    report.samples = n;
    report.dt_ps = dt;
    for (double v : trace.cos_theta) report.peak = std::max(report.peak, std::abs(v));
    if (report.peak == 0.0) {
        report.retained_bins = n / 2 + 1;
        return report;
    }
    report.endpoint_ratio = std::max(std::abs(trace.cos_theta.front()), std::abs(trace.cos_theta.back())) / report.peak;
    if (report.endpoint_ratio >= 1e-6) {
        throw DomainError("spectral_derivative_check: trace has not decayed at the grid ends (ratio " +
                          std::to_string(report.endpoint_ratio) + ")");
    }
    const auto f = forward_plus(trace.cos_theta);
    const auto df = forward_plus(trace.dcos_dt_per_ps);
    report.retained_bins = f.size();
    double scale = 0.0;
    double worst = 0.0;
    const double dw = 2.0 * std::numbers::pi / (static_cast<double>(n) * dt);
    for (std::size_t k = 0; k < f.size(); ++k) {
        const double w = dw * static_cast<double>(k);
        const std::complex<double> expected = std::complex<double>(0.0, -w) * f[k];
        scale = std::max(scale, std::abs(expected));
        worst = std::max(worst, std::abs(df[k] - expected));
    }
    report.max_deviation = scale > 0.0 ? worst / scale : 0.0;
    return report;
}

double echo_spacing(const MoleculeSpec& molecule) {
    molecule.validate();
    return 1e12 / (2.0 * units::PhysicalConstants::speed_of_light * molecule.constants.B_e);
}

double alpha_from_conditions(double path_cm, double pressure_bar, double temperature_K, double dipole_debye) {
    if (!(path_cm >= 0.0) || !(pressure_bar >= 0.0) || !(temperature_K > 0.0) || !(dipole_debye >= 0.0)) {
        throw DomainError("alpha_from_conditions: arguments must be non-negative and T > 0");
    }
    using k = units::PhysicalConstants;
    const double density = pressure_bar * 1e5 / (k::boltzmann_si * temperature_K);  // m^-3
    const double mu = dipole_debye * k::debye_si;
    const double c_si = k::speed_of_light * 1e-2;
    const double alpha_si = path_cm * 1e-2 * density * mu / (2.0 * c_si * k::vacuum_permittivity);  // V s / m
    return alpha_si * 1e-5 * 1e12;
}

}  // namespace symtop
