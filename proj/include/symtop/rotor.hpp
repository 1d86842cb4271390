#pragma once

#include <cstddef>
#include <vector>

// Symmetric-top spectroscopy in the Wigner basis |J,K,M>.
//
// A linearly polarised field couples only states with equal K and M, so both
// H0 and cos(theta) decompose into independent (K,M) blocks that are real
// symmetric tridiagonal in J.

namespace symtop {

/// Rotational and centrifugal constants of a prolate symmetric top, cm^-1.
/// Defaults are the CH3I values.
struct RotorConstants {
    double B_e = 0.25098;
    double A_e = 5.173949;
    double D_J = 2.1040012e-7;
    double D_JK = 3.2944780e-6;
    double D_K = 8.7632195e-5;

    void validate() const;
};

struct MoleculeSpec {
    RotorConstants constants;
    double dipole_debye = 1.6406;

    void validate() const;
};

struct BasisState {
    int J = 0;
    int K = 0;
    int M = 0;

    friend bool operator==(const BasisState&, const BasisState&) = default;
};

/// Field-free energy E_JK in cm^-1. Throws DomainError if |K| > J.
double energy(const RotorConstants& constants, int J, int K);

/// <J+1,K,M| cos(theta) |J,K,M>, non-negative in the standard phase convention.
double cos_theta_coupling(int J, int K, int M);

/// <J,K,M| cos(theta) |J,K,M> = K M / (J (J+1)); zero for J = 0.
double cos_theta_diagonal(int J, int K, int M);

/// H0 and cos(theta) restricted to one (K,M) block, J = j_min..j_max.
struct BlockOperators {
    int K = 0;
    int M = 0;
    int j_min = 0;
    int j_max = 0;
    std::vector<double> energies;  // hartree, one per J
    std::vector<double> coupling;  // <J+1|cos|J>, size() - 1 entries
    std::vector<double> diagonal;  // <J|cos|J>

    std::size_t size() const noexcept { return energies.size(); }
    int j_at(std::size_t index) const noexcept { return j_min + static_cast<int>(index); }
    std::size_t index_of(int J) const;
};

BlockOperators build_block(const MoleculeSpec& molecule, int K, int M, int j_max);

}  // namespace symtop
