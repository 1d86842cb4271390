#include <cmath>

#include "doctest.h"
#include "symtop/error.hpp"
#include "symtop/thermal.hpp"
#include "symtop/units.hpp"

using namespace symtop;

TEST_SUITE("thermal") {

TEST_CASE("zero-temperature limit") {
    const MoleculeSpec mol;
    EnsembleSpec spec;
    spec.temperature_K = 1e-6;
    CHECK(partition_function(mol, spec) == doctest::Approx(1.0).epsilon(1e-15));
    const auto members = enumerate_members(mol, spec);
    REQUIRE(members.size() == 1);
    CHECK(members[0].state == BasisState{0, 0, 0});
    CHECK(members[0].weight == 1.0);
    CHECK(members[0].multiplicity == 1);
}

TEST_CASE("Boltzmann ratio at 298 K") {
    const MoleculeSpec mol;
    const double kt = units::PhysicalConstants::boltzmann_wavenumber * 298.0;
    CHECK(kt == doctest::Approx(207.12).epsilon(1e-4));
    EnsembleSpec spec;
    spec.weight_cutoff = 0.0;
    const auto members = enumerate_members(mol, spec);
    double w00 = 0.0, w10 = 0.0;
    for (const auto& m : members) {
        if (m.state == BasisState{0, 0, 0}) w00 = m.weight;
        if (m.state == BasisState{1, 0, 0}) w10 = m.weight;
    }
    CHECK(w10 / w00 == doctest::Approx(std::exp(-0.50195916 / 207.12)).epsilon(1e-6));
    CHECK(w10 / w00 == doctest::Approx(0.99758).epsilon(1e-5));
}

TEST_CASE("partition function sums every M") {
    const MoleculeSpec mol;
    const double kt = units::PhysicalConstants::boltzmann_wavenumber * 50.0;
    double z = 0.0;
    for (int J = 0; J <= 40; ++J) {
        for (int K = -J; K <= J; ++K) {
            for (int M = -J; M <= J; ++M) z += std::exp(-energy(mol.constants, J, K) / kt);
        }
    }
    CHECK(partition_function_unchecked(mol, 50.0, 40) == doctest::Approx(z).epsilon(1e-12));
}

TEST_CASE("truncation check reports the required J_max") {
    const MoleculeSpec mol;
    EnsembleSpec spec;
    spec.j_max = 3;
    try {
        partition_function(mol, spec);
        FAIL("expected TruncationError");
    } catch (const TruncationError& e) {
        CHECK(e.required_j_max() > 3);
        CHECK(shell_fraction(mol, 298.0, e.required_j_max(), e.required_j_max()) < spec.truncation_tolerance);
    }
    CHECK_NOTHROW(partition_function(mol, EnsembleSpec{}));
}

TEST_CASE("members are valid, folded and normalised") {
    const MoleculeSpec mol;
    EnsembleSpec spec;
    spec.temperature_K = 60.0;
    spec.j_max = 40;
    const auto members = enumerate_members(mol, spec);
    double total = 0.0, orientation = 0.0;
    for (const auto& m : members) {
        const auto& s = m.state;
        REQUIRE(s.K >= 0);
        REQUIRE(s.K <= s.J);
        REQUIRE(std::abs(s.M) <= s.J);
        REQUIRE(m.weight > 0.0);
        REQUIRE(m.multiplicity == (s.K > 0 ? 2 : 1));
        total += m.weight * m.multiplicity;
        orientation += m.weight * m.multiplicity * cos_theta_diagonal(s.J, s.K, s.M);
    }
    CHECK(std::abs(total - 1.0) < 1e-12);
    CHECK(std::abs(orientation) < 1e-14);
}

TEST_CASE("weights are even in K before the fold") {
    const MoleculeSpec mol;
    for (int J = 0; J <= 30; ++J) {
        for (int K = 0; K <= J; ++K) REQUIRE(energy(mol.constants, J, K) == energy(mol.constants, J, -K));
    }
}

TEST_CASE("cutoff is relative to the heaviest state") {
    const MoleculeSpec mol;
    EnsembleSpec spec;
    spec.temperature_K = 298.0;
    const auto all = [&] {
        EnsembleSpec s = spec;
        s.weight_cutoff = 0.0;
        return enumerate_members(mol, s);
    }();
    const auto kept = enumerate_members(mol, spec);
    CHECK(kept.size() < all.size());
    double heaviest = 0.0;
    for (const auto& m : all) heaviest = std::max(heaviest, m.weight);
    std::size_t expected = 0;
    for (const auto& m : all) expected += m.weight > spec.weight_cutoff * heaviest ? 1 : 0;
    CHECK(kept.size() == expected);
}

TEST_CASE("spec validation") {
    EnsembleSpec s;
    s.temperature_K = 0.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.weight_cutoff = 1.0;
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s = {};
    s.j_max = -1;
    CHECK_THROWS_AS(s.validate(), ConfigError);
}

}
