#include <cmath>
#include <random>

#include "doctest.h"
#include "symtop/error.hpp"
#include "symtop/units.hpp"

using namespace symtop;
using units::Quantity;

TEST_SUITE("units") {

TEST_CASE("constants are positive") {
    using C = units::PhysicalConstants;
    for (double v : {C::speed_of_light, C::boltzmann_wavenumber, C::au_time, C::au_field, C::debye_per_au,
                     C::wavenumber_per_hartree, C::atm_per_bar}) {
        CHECK(v > 0.0);
    }
}

TEST_CASE("reference conversions") {
    CHECK(units::to_atomic(0.0, Quantity::energy_wavenumber) == 0.0);
    CHECK(units::from_atomic(0.0, Quantity::field_kV_per_cm) == 0.0);
    // 1 D = 0.393430 e a0
    CHECK(units::to_atomic(1.6406, Quantity::dipole_debye) == doctest::Approx(1.6406 * 0.393430).epsilon(1e-6));
    CHECK(units::to_atomic(1.6406, Quantity::dipole_debye) == doctest::Approx(0.64546).epsilon(1e-5));
    CHECK(units::to_atomic(1.0, Quantity::time_ps) == doctest::Approx(1e-12 / 2.4188843265e-17).epsilon(1e-10));
    CHECK(units::to_atomic(1.0, Quantity::time_ps) == doctest::Approx(41341.37).epsilon(1e-7));
    const double b = units::from_atomic(units::to_atomic(0.25098, Quantity::energy_wavenumber),
                                        Quantity::energy_wavenumber);
    CHECK(std::abs(b - 0.25098) <= 1e-12 * 0.25098);
    const double t = units::from_atomic(units::to_atomic(5.3, Quantity::time_ps), Quantity::time_ps);
    CHECK(std::abs(t - 5.3) <= 1e-12 * 5.3);
}

TEST_CASE("temperature maps to kT in hartree") {
    const double kt = units::to_atomic(298.0, Quantity::temperature_K);
    CHECK(kt * units::PhysicalConstants::wavenumber_per_hartree == doctest::Approx(207.12).epsilon(1e-4));
}

TEST_CASE("round trip over random magnitudes") {
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> exponent(-6.0, 6.0);
    for (Quantity q : {Quantity::energy_wavenumber, Quantity::time_ps, Quantity::field_kV_per_cm,
                       Quantity::dipole_debye, Quantity::temperature_K}) {
        for (int i = 0; i < 2000; ++i) {
            const double x = std::pow(10.0, exponent(rng)) * (i % 2 ? -1.0 : 1.0);
            const double y = units::from_atomic(units::to_atomic(x, q), q);
            REQUIRE(std::abs(y - x) <= 1e-12 * std::abs(x));
        }
    }
}

TEST_CASE("unsupported kinds and non-finite values") {
    CHECK_THROWS_AS(units::to_atomic(1.0, static_cast<Quantity>(42)), ConfigError);
    CHECK_THROWS_AS(units::from_atomic(1.0, static_cast<Quantity>(42)), ConfigError);
    CHECK_THROWS_AS(units::parse_quantity("pressure_bar"), ConfigError);
    CHECK_THROWS_AS(units::to_atomic(std::nan(""), Quantity::time_ps), DomainError);
    CHECK(units::parse_quantity("time_ps") == Quantity::time_ps);
    CHECK(units::to_string(Quantity::dipole_debye) == "dipole_debye");
}

TEST_CASE("bar to atm") { CHECK(units::bar_to_atm(1.0) == doctest::Approx(0.986923).epsilon(1e-6)); }

}
