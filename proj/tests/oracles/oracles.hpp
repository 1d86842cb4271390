#pragma once

// Independent reference implementations used only by tests and `symtop check`.
// Nothing here calls into the production propagator or matrix elements.

#include <span>
#include <vector>

namespace symtop::oracle {

/// Wigner 3j symbol (GSL, Racah formula). Integer arguments.
double wigner3j(int j1, int j2, int j3, int m1, int m2, int m3);

/// <J',K,M| cos(theta) |J,K,M> from the 3j product formula.
double cos_element_3j(int j_prime, int j, int k, int m);

/// Wigner small-d d^j_{m'm}(beta) from the explicit factorial sum.
double wigner_small_d(int j, int m_prime, int m, double beta);

/// <J',K,M| cos(theta) |J,K,M> by Gauss-Legendre quadrature over the
/// symmetric-top wavefunctions.
double cos_element_quadrature(int j_prime, int j, int k, int m);

struct RotorModel {
    double B = 0.25098, A = 5.173949;
    double DJ = 2.1040012e-7, DJK = 3.2944780e-6, DK = 8.7632195e-5;
    double dipole_debye = 1.6406;
    double temperature_K = 298.0;
    int j_max = 90;
};

struct PulseModel {
    double E1_kV_per_cm = 100.0;
    double tau_ps = 1.0;
    double t0_ps = 0.0;
};

/// First-order perturbation theory for the thermal <cos(theta)>(t) after the
/// pulse, summed over every |J,K,M> with J <= j_max (no weight cutoff).
/// Times must lie after t0 + 6 sigma.
std::vector<double> first_order_orientation(const RotorModel& model, const PulseModel& pulse,
                                            std::span<const double> time_ps);

/// |<J+1,K,M|c(t)>|^2 for the member |J=0,K=0,M=0> at first order.
double first_order_transfer_00(const RotorModel& model, const PulseModel& pulse);

struct PropagationComparison {
    double full_vs_first = 0.0;        // max |E_full - E_first| / max |E_first|
    double first_vs_derivative = 0.0;  // max |E_first - (E0 - alpha dC/dt)| / max |E_first|
    double max_abs_g = 0.0;            // largest first-order phase |w alpha C / E|
};

/// Propagates the incident field through the medium with the full exponential
/// exp(g), g = i w alpha C(w) / E(w), and with its first-order expansion 1 + g.
/// Bins with |E(w)| below 1e-6 of its maximum are left untouched. The grid
/// must be uniform.
PropagationComparison compare_propagation(std::span<const double> time_ps, std::span<const double> incident,
                                          std::span<const double> cos_theta, std::span<const double> dcos_dt,
                                          double alpha);

}  // namespace symtop::oracle
