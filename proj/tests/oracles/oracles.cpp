#include "oracles.hpp"

#include <fftw3.h>
#include <gsl/gsl_sf_coupling.h>

#include <algorithm>
#include <boost/math/quadrature/gauss.hpp>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>

namespace symtop::oracle {

namespace {

constexpr double kPi = std::numbers::pi;
// CODATA 2018
constexpr double kHartreeWavenumber = 219474.6313632;
constexpr double kAuTimePs = 2.4188843265857e-5;
constexpr double kAuFieldKvPerCm = 5.14220674763e6;
constexpr double kDebyePerAu = 2.541746473;
constexpr double kKelvinWavenumber = 0.6950348004;

double factorial(int n) { return std::tgamma(n + 1.0); }

double energy(const RotorModel& m, int J, int K) {
    const double x = J * (J + 1.0);
    const double k2 = static_cast<double>(K) * K;
    return m.B * x + (m.A - m.B) * k2 - m.DJ * x * x - m.DJK * x * k2 - m.DK * k2 * k2;
}

// Fourier cosine integral of the pulse about its centre, atomic units.
double pulse_spectrum_au(const PulseModel& p, double omega_au) {
    const double sigma = p.tau_ps / std::sqrt(16.0 * std::log(2.0)) / kAuTimePs;
    const double d1 = std::pow(2.0 * std::sqrt(kPi), -0.5);
    const double d3 = std::pow(8.0 * 6.0 * std::sqrt(kPi), -0.5);
    const double a = omega_au * sigma;
    const double e1 = p.E1_kV_per_cm / kAuFieldKvPerCm;
    // int exp(-u^2/2) cos(a u) du = sqrt(2 pi) e^{-a^2/2};  with u^2: (1 - a^2) times that
    const double gauss = std::sqrt(2.0 * kPi) * std::exp(-0.5 * a * a);
    return 0.5 * e1 * sigma * gauss * (-3.0 * d3 * (4.0 * (1.0 - a * a) - 2.0) + d1);
}

}  // namespace

double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3) {
    return gsl_sf_coupling_3j(2 * j1, 2 * j2, 2 * j3, 2 * m1, 2 * m2, 2 * m3);
}

double cos_element_3j(int jp, int j, int k, int m) {
    const double phase = ((m - k) % 2 == 0) ? 1.0 : -1.0;
    return phase * std::sqrt((2.0 * j + 1.0) * (2.0 * jp + 1.0)) * wigner3j(jp, 1, j, m, 0, -m) *
           wigner3j(jp, 1, j, k, 0, -k);
}

double wigner_small_d(int j, int mp, int m, double beta) {
    const double c = std::cos(0.5 * beta);
    const double s = std::sin(0.5 * beta);
    const double pre = std::sqrt(factorial(j + mp) * factorial(j - mp) * factorial(j + m) * factorial(j - m));
    double sum = 0.0;
    for (int k = std::max(0, m - mp); k <= std::min(j + m, j - mp); ++k) {
        const double sign = ((mp - m + k) % 2 == 0) ? 1.0 : -1.0;
        const double den = factorial(j + m - k) * factorial(k) * factorial(mp - m + k) * factorial(j - mp - k);
        sum += sign / den * std::pow(c, 2 * j + m - mp - 2 * k) * std::pow(s, mp - m + 2 * k);
    }
    return pre * sum;
}

double cos_element_quadrature(int jp, int j, int k, int m) {
    auto integrand = [&](double x) {
        const double beta = std::acos(x);
        return wigner_small_d(jp, m, k, beta) * wigner_small_d(j, m, k, beta) * x;
    };
    const double integral = boost::math::quadrature::gauss<double, 40>::integrate(integrand, -1.0, 1.0);
    return 0.5 * std::sqrt((2.0 * j + 1.0) * (2.0 * jp + 1.0)) * integral;
}

std::vector<double> first_order_orientation(const RotorModel& model, const PulseModel& pulse,
                                            std::span<const double> time_ps) {
    const double sigma_ps = pulse.tau_ps / std::sqrt(16.0 * std::log(2.0));
    for (double t : time_ps) {
        if (t < pulse.t0_ps + 6.0 * sigma_ps) throw std::domain_error("oracle: time inside the pulse");
    }
    const double kt = kKelvinWavenumber * model.temperature_K;
    double z = 0.0;
    for (int J = 0; J <= model.j_max; ++J) {
        for (int K = -J; K <= J; ++K) z += (2.0 * J + 1.0) * std::exp(-energy(model, J, K) / kt);
    }
    const double mu = model.dipole_debye / kDebyePerAu;
    struct Line {
        double omega_ps;
        double amplitude;
    };
    std::vector<Line> lines;
    for (int J = 0; J < model.j_max; ++J) {
        for (int K = -J; K <= J; ++K) {
            const double wj = std::exp(-energy(model, J, K) / kt) / z;
            const double wj1 = std::exp(-energy(model, J + 1, K) / kt) / z;
            double q2 = 0.0;
            for (int M = -J; M <= J; ++M) q2 += std::pow(cos_element_3j(J + 1, J, K, M), 2);
            const double omega_cm = energy(model, J + 1, K) - energy(model, J, K);
            const double omega_au = omega_cm / kHartreeWavenumber;
            lines.push_back({omega_au / kAuTimePs, 2.0 * (wj - wj1) * mu * q2 * pulse_spectrum_au(pulse, omega_au)});
        }
    }
    std::vector<double> out(time_ps.size(), 0.0);
    for (std::size_t i = 0; i < time_ps.size(); ++i) {
        const double s = time_ps[i] - pulse.t0_ps;
        double v = 0.0;
        for (const auto& l : lines) v += l.amplitude * std::sin(l.omega_ps * s);
        out[i] = v;
    }
    return out;
}

double first_order_transfer_00(const RotorModel& model, const PulseModel& pulse) {
    const double mu = model.dipole_debye / kDebyePerAu;
    const double omega_au = (energy(model, 1, 0) - energy(model, 0, 0)) / kHartreeWavenumber;
    const double q = cos_element_3j(1, 0, 0, 0);
    const double amp = mu * q * pulse_spectrum_au(pulse, omega_au);
    return amp * amp;
}

PropagationComparison compare_propagation(std::span<const double> t, std::span<const double> incident,
                                          std::span<const double> cos_theta, std::span<const double> dcos_dt,
                                          double alpha) {
    const int n = static_cast<int>(t.size());
    if (n < 4 || incident.size() != t.size() || cos_theta.size() != t.size() || dcos_dt.size() != t.size()) {
        throw std::invalid_argument("oracle: inconsistent inputs");
    }
    const double dt = (t.back() - t.front()) / (n - 1);
    const int bins = n / 2 + 1;
    std::vector<double> buf(n);
    std::vector<std::complex<double>> e(bins), c(bins), first(bins), full(bins);
    auto forward = [&](std::span<const double> x, std::vector<std::complex<double>>& out) {
        std::copy(x.begin(), x.end(), buf.begin());
        fftw_plan p = fftw_plan_dft_r2c_1d(n, buf.data(), reinterpret_cast<fftw_complex*>(out.data()), FFTW_ESTIMATE);
        fftw_execute(p);
        fftw_destroy_plan(p);
    };
    auto inverse = [&](std::vector<std::complex<double>> spec) {
        std::vector<double> out(n);
        fftw_plan p = fftw_plan_dft_c2r_1d(n, reinterpret_cast<fftw_complex*>(spec.data()), out.data(), FFTW_ESTIMATE);
        fftw_execute(p);
        fftw_destroy_plan(p);
        for (double& v : out) v /= n;
        return out;
    };
    forward(incident, e);
    forward(cos_theta, c);
    double emax = 0.0;
    for (const auto& v : e) emax = std::max(emax, std::abs(v));
    PropagationComparison result;
    for (int k = 0; k < bins; ++k) {
        const double w = 2.0 * kPi * k / (n * dt);
        // FFTW uses exp(-i w t); in that convention the medium factor is exp(-i w alpha C / E).
        std::complex<double> g = 0.0;
        if (std::abs(e[k]) > 1e-6 * emax) g = std::complex<double>(0.0, -w * alpha) * c[k] / e[k];
        if (2 * k == n || k == 0) g = g.real();  // keep the inverse transform real
        result.max_abs_g = std::max(result.max_abs_g, std::abs(g));
        first[k] = e[k] * (1.0 + g);
        full[k] = e[k] * std::exp(g);
    }
    const auto f1 = inverse(first);
    const auto f2 = inverse(full);
    double scale = 0.0, d12 = 0.0, d1d = 0.0;
    for (int i = 0; i < n; ++i) {
        scale = std::max(scale, std::abs(f1[i]));
        d12 = std::max(d12, std::abs(f2[i] - f1[i]));
        d1d = std::max(d1d, std::abs(f1[i] - (incident[i] - alpha * dcos_dt[i])));
    }
    result.full_vs_first = d12 / scale;
    result.first_vs_derivative = d1d / scale;
    return result;
}

}  // namespace symtop::oracle
