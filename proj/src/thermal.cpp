#include "symtop/thermal.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "symtop/error.hpp"
#include "symtop/units.hpp"

namespace symtop {

namespace {

double kT_wavenumber(double temperature_K) {
    return units::PhysicalConstants::boltzmann_wavenumber * temperature_K;
}

// Sum over K = -J..J of the Boltzmann factor, times the 2J+1 M-degeneracy.
double shell_sum(const RotorConstants& c, double kT, int J) {
    double s = std::exp(-energy(c, J, 0) / kT);
    for (int K = 1; K <= J; ++K) s += 2.0 * std::exp(-energy(c, J, K) / kT);
    return (2.0 * J + 1.0) * s;
}

}  // namespace

void EnsembleSpec::validate() const {
    if (!(temperature_K > 0.0)) throw ConfigError("ensemble.temperature must be > 0");
    if (j_max < 0) throw ConfigError("ensemble.J_max must be >= 0");
    if (!(weight_cutoff >= 0.0 && weight_cutoff < 1.0)) throw ConfigError("ensemble.weight_cutoff must be in [0, 1)");
    if (!(truncation_tolerance > 0.0)) throw ConfigError("ensemble.truncation_tolerance must be > 0");
}

double partition_function_unchecked(const MoleculeSpec& molecule, double temperature_K, int j_max) {
    const double kT = kT_wavenumber(temperature_K);
    double z = 0.0;
    for (int J = 0; J <= j_max; ++J) z += shell_sum(molecule.constants, kT, J);
    return z;
}

double shell_fraction(const MoleculeSpec& molecule, double temperature_K, int J, int j_max) {
    const double kT = kT_wavenumber(temperature_K);
    return shell_sum(molecule.constants, kT, J) / partition_function_unchecked(molecule, temperature_K, j_max);
}

int required_j_max(const MoleculeSpec& molecule, double temperature_K, double tolerance, int search_limit) {
    const double kT = kT_wavenumber(temperature_K);
    double z = 0.0;
    for (int J = 0; J <= search_limit; ++J) {
        const double shell = shell_sum(molecule.constants, kT, J);
        z += shell;
        if (shell / z < tolerance) return J;
    }
    return -1;
}

double partition_function(const MoleculeSpec& molecule, const EnsembleSpec& spec) {
    spec.validate();
    const double z = partition_function_unchecked(molecule, spec.temperature_K, spec.j_max);
    const double top = shell_sum(molecule.constants, kT_wavenumber(spec.temperature_K), spec.j_max) / z;
    if (top >= spec.truncation_tolerance) {
        const int needed = required_j_max(molecule, spec.temperature_K, spec.truncation_tolerance);
        char msg[256];
        std::snprintf(msg, sizeof msg,
                      "partition function not converged: J=%d shell carries %.3g of Z (tolerance %.3g); "
                      "J_max >= %d required",
                      spec.j_max, top, spec.truncation_tolerance, needed);
        throw TruncationError(msg, needed);
    }
    return z;
}

std::vector<EnsembleMember> enumerate_members(const MoleculeSpec& molecule, const EnsembleSpec& spec) {
    spec.validate();
    const double kT = kT_wavenumber(spec.temperature_K);
    const double z = partition_function_unchecked(molecule, spec.temperature_K, spec.j_max);
    // The heaviest single state is the ground state (E_00 = 0).
    const double threshold = spec.weight_cutoff / z;

    std::vector<EnsembleMember> members;
    double total = 0.0;
    for (int K = 0; K <= spec.j_max; ++K) {
        const int multiplicity = K > 0 ? 2 : 1;
        for (int M = -spec.j_max; M <= spec.j_max; ++M) {
            for (int J = std::max(K, std::abs(M)); J <= spec.j_max; ++J) {
                const double w = std::exp(-energy(molecule.constants, J, K) / kT) / z;
                if (!(w > threshold) || w == 0.0) continue;
                members.push_back({BasisState{J, K, M}, w, multiplicity});
                total += w * multiplicity;
            }
        }
    }
    for (auto& m : members) m.weight /= total;
    return members;
}

}  // namespace symtop
