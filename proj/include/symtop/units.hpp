#pragma once

#include <string_view>

// Physical constants and conversions between laboratory units and atomic
// units. Everything downstream computes in atomic units (hbar = e = m_e = 1)
// and converts at the boundary. Values are CODATA 2018.

namespace symtop::units {

struct PhysicalConstants {
    static constexpr double speed_of_light = 2.99792458e10;          // cm/s
    static constexpr double boltzmann_wavenumber = 0.6950348004;     // cm^-1 / K
    static constexpr double au_time = 2.4188843265857e-17;           // s
    static constexpr double au_field = 5.14220674763e9;              // V/cm
    static constexpr double debye_per_au = 2.541746473;              // D per e*a0
    static constexpr double wavenumber_per_hartree = 219474.6313632; // cm^-1
    static constexpr double atm_per_bar = 1.0 / 1.01325;

    // SI values used only by the FID strength helper.
    static constexpr double vacuum_permittivity = 8.8541878128e-12;  // F/m
    static constexpr double boltzmann_si = 1.380649e-23;             // J/K
    static constexpr double debye_si = 3.33564095198152e-30;         // C m
};

inline constexpr const char* constants_version = "CODATA-2018";

enum class Quantity {
    energy_wavenumber,  // cm^-1
    time_ps,            // ps
    field_kV_per_cm,    // kV/cm
    dipole_debye,       // D
    temperature_K,      // K, mapped to k_B T
};

/// Converts `value` given in the laboratory unit of `kind` to atomic units.
/// For temperature_K the result is k_B*T in hartree.
double to_atomic(double value, Quantity kind);

/// Exact inverse of to_atomic for the same kind.
double from_atomic(double value, Quantity kind);

/// Parses a quantity name such as "time_ps". Throws ConfigError for unknown names.
Quantity parse_quantity(std::string_view name);

std::string_view to_string(Quantity kind);

// Shorthands for the conversions used throughout the simulator.
inline constexpr double ps_per_au_time = PhysicalConstants::au_time * 1e12;
inline constexpr double kV_per_cm_per_au_field = PhysicalConstants::au_field * 1e-3;

inline constexpr double ps_to_au(double t_ps) { return t_ps / ps_per_au_time; }
inline constexpr double au_to_ps(double t_au) { return t_au * ps_per_au_time; }
inline constexpr double wavenumber_to_au(double e_cm) {
    return e_cm / PhysicalConstants::wavenumber_per_hartree;
}
inline constexpr double bar_to_atm(double p_bar) { return p_bar * PhysicalConstants::atm_per_bar; }

}  // namespace symtop::units
