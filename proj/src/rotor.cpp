#include "symtop/rotor.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <string>

#include "symtop/error.hpp"
#include "symtop/units.hpp"

namespace symtop {

namespace {

void check_state(int J, int K, int M) {
    if (J < 0 || std::abs(K) > J || std::abs(M) > J) {
        throw DomainError("invalid basis state |J=" + std::to_string(J) + ",K=" + std::to_string(K) +
                          ",M=" + std::to_string(M) + ">");
    }
}

}  // namespace

void RotorConstants::validate() const {
    if (!(B_e > 0.0)) throw ConfigError("molecule.B_e must be > 0");
    if (!(A_e > 0.0)) throw ConfigError("molecule.A_e must be > 0");
    if (!(A_e > B_e)) throw ConfigError("molecule.A_e must exceed molecule.B_e for a prolate top");
    if (!std::isfinite(D_J) || !std::isfinite(D_JK) || !std::isfinite(D_K)) {
        throw ConfigError("centrifugal constants must be finite");
    }
}

void MoleculeSpec::validate() const {
    constants.validate();
    if (!(dipole_debye > 0.0)) throw ConfigError("molecule.dipole must be > 0");
}

double energy(const RotorConstants& c, int J, int K) {
    if (J < 0 || std::abs(K) > J) {
        throw DomainError("energy: |K| must not exceed J (J=" + std::to_string(J) +
                          ", K=" + std::to_string(K) + ")");
    }
    const double jj = static_cast<double>(J) * (J + 1);
    const double k2 = static_cast<double>(K) * K;
    return c.B_e * jj + (c.A_e - c.B_e) * k2 - c.D_J * jj * jj - c.D_JK * jj * k2 - c.D_K * k2 * k2;
}

double cos_theta_coupling(int J, int K, int M) {
    check_state(J, K, M);
    const double j1 = J + 1.0;
    const double num = (j1 * j1 - static_cast<double>(K) * K) * (j1 * j1 - static_cast<double>(M) * M);
    return std::sqrt(num) / (j1 * std::sqrt((2.0 * J + 1.0) * (2.0 * J + 3.0)));
}

double cos_theta_diagonal(int J, int K, int M) {
    check_state(J, K, M);
    if (J == 0) return 0.0;
    return static_cast<double>(K) * M / (static_cast<double>(J) * (J + 1));
}

std::size_t BlockOperators::index_of(int J) const {
    if (J < j_min || J > j_max) {
        throw DomainError("J=" + std::to_string(J) + " outside block range [" + std::to_string(j_min) +
                          ", " + std::to_string(j_max) + "]");
    }
    return static_cast<std::size_t>(J - j_min);
}

BlockOperators build_block(const MoleculeSpec& molecule, int K, int M, int j_max) {
    const int j_min = std::max(std::abs(K), std::abs(M));
    if (j_max < j_min) {
        throw DomainError("build_block: J_max=" + std::to_string(j_max) + " below max(|K|,|M|)=" +
                          std::to_string(j_min));
    }
    BlockOperators block;
    block.K = K;
    block.M = M;
    block.j_min = j_min;
    block.j_max = j_max;
    const auto n = static_cast<std::size_t>(j_max - j_min + 1);
    block.energies.reserve(n);
    block.diagonal.reserve(n);
    block.coupling.reserve(n - 1);
    for (int J = j_min; J <= j_max; ++J) {
        block.energies.push_back(units::wavenumber_to_au(energy(molecule.constants, J, K)));
        block.diagonal.push_back(cos_theta_diagonal(J, K, M));
        if (J < j_max) block.coupling.push_back(cos_theta_coupling(J, K, M));
    }
    return block;
}

}  // namespace symtop
