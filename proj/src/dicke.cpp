#include "pspin/dicke.hpp"

#include <stdexcept>

namespace pspin {

std::vector<double> basis_m_values(int n_spins) {
    if (n_spins < 2)
        throw std::invalid_argument("n_spins must be >= 2, got " +
                                    std::to_string(n_spins));
    std::vector<double> m(static_cast<size_t>(n_spins) + 1);
    for (int k = 0; k <= n_spins; ++k)
        m[static_cast<size_t>(k)] = static_cast<double>(2 * k - n_spins) / n_spins;
    return m;
}

SectorHamiltonian build_sector_hamiltonian(const ModelParams& params, int n_spins) {
    validate(params);
    if (n_spins < 2)
        throw std::invalid_argument("n_spins must be >= 2, got " +
                                    std::to_string(n_spins));
    SectorHamiltonian h;
    h.n_spins = n_spins;
    h.params = params;
    build_sector_bands<double>(params.p, params.s, params.lambda, n_spins,
                               h.diag, h.off1, h.off2);
    return h;
}

} // namespace pspin
