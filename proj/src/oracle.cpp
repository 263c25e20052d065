#include "pspin/oracle.hpp"

#include <lapacke.h>

#include <cmath>
#include <stdexcept>
#include <vector>

namespace pspin {

namespace {

void check_small_n(int n_spins) {
    if (n_spins < 2 || n_spins > 12)
        throw std::invalid_argument(
            "full-Hilbert-space reference supports 2 <= n_spins <= 12 only");
}

double diag_term(const ModelParams& pr, int n, unsigned state) {
    const int mz = 2 * __builtin_popcount(state) - n;
    const double m = static_cast<double>(mz) / n;
    // -N m_z^p plus the i = j part of N m_x^2, which is the identity.
    return pr.s * pr.lambda * (-n * ipow(m, pr.p)) + pr.s * (1.0 - pr.lambda);
}

// w += H v in the full 2^n basis (H extensive).
void apply_full(const ModelParams& pr, int n, const std::vector<double>& v,
                std::vector<double>& w) {
    const unsigned dim = 1u << n;
    const double flip1 = -(1.0 - pr.s);
    const double flip2 = pr.s * (1.0 - pr.lambda) * 2.0 / n;
    for (unsigned x = 0; x < dim; ++x) {
        const double vx = v[x];
        if (vx == 0.0) continue;
        w[x] += diag_term(pr, n, x) * vx;
        for (int i = 0; i < n; ++i) {
            w[x ^ (1u << i)] += flip1 * vx;
            for (int j = i + 1; j < n; ++j)
                w[x ^ (1u << i) ^ (1u << j)] += flip2 * vx;
        }
    }
}

}  // namespace

FullSpectrumResult full_hamiltonian_lowest(const ModelParams& params, int n_spins,
                                           int k) {
    validate(params);
    check_small_n(n_spins);
    const lapack_int dim = 1 << n_spins;
    if (k < 1 || k > dim)
        throw std::invalid_argument("full_hamiltonian_lowest: k out of range");

    std::vector<double> a(static_cast<std::size_t>(dim) * dim, 0.0);
    const double flip1 = -(1.0 - params.s);
    const double flip2 = params.s * (1.0 - params.lambda) * 2.0 / n_spins;
    for (lapack_int x = 0; x < dim; ++x) {
        a[static_cast<std::size_t>(x) * dim + x] =
            diag_term(params, n_spins, static_cast<unsigned>(x));
        for (int i = 0; i < n_spins; ++i) {
            const lapack_int y1 = x ^ (1 << i);
            a[static_cast<std::size_t>(x) * dim + y1] += flip1;
            for (int j = i + 1; j < n_spins; ++j) {
                const lapack_int y2 = x ^ (1 << i) ^ (1 << j);
                a[static_cast<std::size_t>(x) * dim + y2] += flip2;
            }
        }
    }

    std::vector<double> w(dim);
    const lapack_int info =
        LAPACKE_dsyevd(LAPACK_ROW_MAJOR, 'N', 'U', dim, a.data(), dim, w.data());
    if (info != 0)
        throw numerical_error("full_hamiltonian_lowest: dsyevd failed");

    FullSpectrumResult out;
    out.n_spins = n_spins;
    out.lowest.assign(w.begin(), w.begin() + k);
    return out;
}

SectorHamiltonian project_to_dicke(const ModelParams& params, int n_spins) {
    validate(params);
    check_small_n(n_spins);
    const unsigned dim = 1u << n_spins;
    const int nb = n_spins + 1;

    // Normalized symmetric basis vectors, one per total magnetization.
    std::vector<std::vector<double>> dicke(nb, std::vector<double>(dim, 0.0));
    std::vector<double> count(nb, 0.0);
    for (unsigned x = 0; x < dim; ++x) count[__builtin_popcount(x)] += 1.0;
    for (unsigned x = 0; x < dim; ++x) {
        const int c = __builtin_popcount(x);
        dicke[c][x] = 1.0 / std::sqrt(count[c]);
    }

    std::vector<std::vector<double>> b(nb, std::vector<double>(nb, 0.0));
    for (int kc = 0; kc < nb; ++kc) {
        std::vector<double> w(dim, 0.0);
        apply_full(params, n_spins, dicke[kc], w);
        for (int kr = 0; kr < nb; ++kr) {
            double dot = 0.0;
            for (unsigned x = 0; x < dim; ++x) dot += dicke[kr][x] * w[x];
            b[kr][kc] = dot / n_spins;  // per-spin units
        }
    }

    double scale = 0.0;
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j) scale = std::max(scale, std::abs(b[i][j]));
    for (int i = 0; i < nb; ++i)
        for (int j = 0; j < nb; ++j)
            if (std::abs(i - j) > 2 && std::abs(b[i][j]) > 1e-12 * scale)
                throw numerical_error(
                    "project_to_dicke: projected matrix is not pentadiagonal");

    SectorHamiltonian h;
    h.n_spins = n_spins;
    h.params = params;
    h.diag.resize(nb);
    h.off1.resize(nb - 1);
    h.off2.resize(nb - 2);
    for (int i = 0; i < nb; ++i) h.diag[i] = b[i][i];
    for (int i = 0; i + 1 < nb; ++i) h.off1[i] = 0.5 * (b[i][i + 1] + b[i + 1][i]);
    for (int i = 0; i + 2 < nb; ++i) h.off2[i] = 0.5 * (b[i][i + 2] + b[i + 2][i]);
    return h;
}

}  // namespace pspin
