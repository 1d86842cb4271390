#include "symtop/units.hpp"

#include <cmath>
#include <string>

#include "symtop/error.hpp"

namespace symtop::units {

namespace {

using C = PhysicalConstants;

// Multiplicative factor lab -> atomic for each kind.
double factor(Quantity kind) {
    switch (kind) {
        case Quantity::energy_wavenumber:
            return 1.0 / C::wavenumber_per_hartree;
        case Quantity::time_ps:
            return 1.0 / ps_per_au_time;
        case Quantity::field_kV_per_cm:
            return 1.0 / kV_per_cm_per_au_field;
        case Quantity::dipole_debye:
            return 1.0 / C::debye_per_au;
        case Quantity::temperature_K:
            return C::boltzmann_wavenumber / C::wavenumber_per_hartree;
    }
    throw ConfigError("unsupported quantity kind " + std::to_string(static_cast<int>(kind)));
}

void require_finite(double value) {
    if (!std::isfinite(value)) throw DomainError("unit conversion of a non-finite value");
}

}  // namespace

double to_atomic(double value, Quantity kind) {
    require_finite(value);
    return value * factor(kind);
}

double from_atomic(double value, Quantity kind) {
    require_finite(value);
    return value / factor(kind);
}

Quantity parse_quantity(std::string_view name) {
    if (name == "energy_wavenumber") return Quantity::energy_wavenumber;
    if (name == "time_ps") return Quantity::time_ps;
    if (name == "field_kV_per_cm") return Quantity::field_kV_per_cm;
    if (name == "dipole_debye") return Quantity::dipole_debye;
    if (name == "temperature_K") return Quantity::temperature_K;
    throw ConfigError("unsupported quantity kind '" + std::string(name) + "'");
}

std::string_view to_string(Quantity kind) {
    switch (kind) {
        case Quantity::energy_wavenumber: return "energy_wavenumber";
        case Quantity::time_ps: return "time_ps";
        case Quantity::field_kV_per_cm: return "field_kV_per_cm";
        case Quantity::dipole_debye: return "dipole_debye";
        case Quantity::temperature_K: return "temperature_K";
    }
    throw ConfigError("unsupported quantity kind");
}

}  // namespace symtop::units
