#pragma once

#include <vector>

#include "symtop/rotor.hpp"

namespace symtop {

struct EnsembleSpec {
    double temperature_K = 298.0;
    int j_max = 90;
    /// Members lighter than weight_cutoff * (heaviest weight) are dropped.
    double weight_cutoff = 1e-8;
    /// Largest allowed share of Z carried by the J = j_max shell.
    double truncation_tolerance = 1e-4;

    void validate() const;
};

/// One thermally populated |J,K,M> with K >= 0. A member with K > 0 also
/// stands for its (-K,-M) partner, which evolves identically.
struct EnsembleMember {
    BasisState state;
    double weight = 0.0;   // per state, after renormalisation
    int multiplicity = 1;  // 2 for K > 0, 1 for K = 0
};

/// Fraction of the truncated partition function carried by the shell J.
double shell_fraction(const MoleculeSpec& molecule, double temperature_K, int J, int j_max);

/// Smallest J_max whose top shell carries less than `tolerance` of Z, or -1 if
/// none below `search_limit` does.
int required_j_max(const MoleculeSpec& molecule, double temperature_K, double tolerance, int search_limit = 250);

/// Partition function summed over J <= j_max, all K and M. Throws
/// TruncationError if the top shell exceeds spec.truncation_tolerance.
double partition_function(const MoleculeSpec& molecule, const EnsembleSpec& spec);

/// Same sum without the truncation check.
double partition_function_unchecked(const MoleculeSpec& molecule, double temperature_K, int j_max);

/// Members ordered by K, then M, then J (the canonical order used everywhere).
std::vector<EnsembleMember> enumerate_members(const MoleculeSpec& molecule, const EnsembleSpec& spec);

}  // namespace symtop
