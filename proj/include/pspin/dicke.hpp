#pragma once

#include <cmath>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

// Banded representation of the per-spin Hamiltonian E = H/N restricted to the
// maximum-spin sector S = N/2 (dimension N+1, half-bandwidth 2).
// Basis convention: index k = 0..N maps to magnetization m = -1 + 2k/N.
struct SectorHamiltonian {
    int n_spins = 0;            // N >= 2
    ModelParams params;
    std::vector<double> diag;   // length N+1
    std::vector<double> off1;   // length N,   element (k+1, k)
    std::vector<double> off2;   // length N-1, element (k+2, k)
};

// m values of the sector basis: N+1 equally spaced points from -1 to 1.
std::vector<double> basis_m_values(int n_spins);

// Builds the sector matrix from the angular-momentum ladder rule
//   S+-|S,M> = sqrt(S(S+1) - M(M+-1)) |S,M+-1>
// applied to the operator form of E: the tridiagonal m_x is assembled from
// ladder amplitudes, squared into the pentadiagonal m_x^2, and combined with
// the diagonal m_z^p. Templated so the same single construction path serves
// double and extended-precision scalars.
template <class Real>
void build_sector_bands(int p, const Real& s, const Real& lambda, int n_spins,
                        std::vector<Real>& diag, std::vector<Real>& off1,
                        std::vector<Real>& off2) {
    using std::sqrt;
    const int n = n_spins;
    const Real S = Real(n) / 2;
    const Real one(1);

    // x[k] = <k+1| m_x |k> = sqrt(S(S+1) - M_k (M_k + 1)) / (2S), M_k = k - S.
    std::vector<Real> x(static_cast<size_t>(n), Real(0));
    for (int k = 0; k < n; ++k) {
        const Real M = Real(k) - S;
        const Real amp = S * (S + one) - M * (M + one);
        x[static_cast<size_t>(k)] = sqrt(amp) / (2 * S);
    }

    diag.assign(static_cast<size_t>(n) + 1, Real(0));
    off1.assign(static_cast<size_t>(n), Real(0));
    off2.assign(static_cast<size_t>(n) - 1, Real(0));

    const Real cti = s * (one - lambda);
    for (int k = 0; k <= n; ++k) {
        const Real m = (Real(2 * k) - Real(n)) / Real(n);
        Real mp = one;
        for (int i = 0; i < p; ++i) mp *= m;
        Real x2sum(0); // (m_x^2)_{kk} = x_{k-1}^2 + x_k^2
        if (k > 0) x2sum += x[static_cast<size_t>(k - 1)] * x[static_cast<size_t>(k - 1)];
        if (k < n) x2sum += x[static_cast<size_t>(k)] * x[static_cast<size_t>(k)];
        diag[static_cast<size_t>(k)] = -s * lambda * mp + cti * x2sum;
    }
    for (int k = 0; k < n; ++k)
        off1[static_cast<size_t>(k)] = -(one - s) * x[static_cast<size_t>(k)];
    for (int k = 0; k + 1 < n; ++k)
        off2[static_cast<size_t>(k)] = cti * x[static_cast<size_t>(k + 1)] * x[static_cast<size_t>(k)];
}

// Public double-precision builder with validation.
SectorHamiltonian build_sector_hamiltonian(const ModelParams& params, int n_spins);

} // namespace pspin
