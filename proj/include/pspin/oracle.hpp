#pragma once

#include <vector>

#include "pspin/dicke.hpp"

namespace pspin {

// Brute-force full-Hilbert-space reference for small N; test/validation use
// only. Energies are extensive (units of H, not H/N).
struct FullSpectrumResult {
    int n_spins = 0;
    std::vector<double> lowest;  // k smallest eigenvalues, ascending
};

// Dense 2^N diagonalization of H(s, lambda) built from tensor-product
// single-site operators. Refuses n_spins > 12.
FullSpectrumResult full_hamiltonian_lowest(const ModelParams& params,
                                           int n_spins, int k);

// Projects the full 2^N Hamiltonian onto the normalized symmetric (Dicke)
// basis vectors and reads off the per-spin sector matrix elements. Refuses
// n_spins > 12.
SectorHamiltonian project_to_dicke(const ModelParams& params, int n_spins);

} // namespace pspin
