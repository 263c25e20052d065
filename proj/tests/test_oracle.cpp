#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check_near.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include "pspin/oracle.hpp"
#include "pspin/spectral.hpp"

using namespace pspin;

TEST_CASE("pure transverse field spectrum at N=4") {
    // H = -sum_i sigma_x^i: extensive eigenvalues -4, -2, -2, ...
    const auto full = full_hamiltonian_lowest({3, 0.0, 1.0}, 4, 3);
    REQUIRE(full.lowest.size() == 3);
    CHECK_NEAR(full.lowest[0], -4.0, 1e-12);
    CHECK_NEAR(full.lowest[1], -2.0, 1e-12);
    CHECK_NEAR(full.lowest[2], -2.0, 1e-12);
}

TEST_CASE("size and argument guards") {
    CHECK_THROWS_AS(full_hamiltonian_lowest({3, 0.5, 0.5}, 13, 2), std::invalid_argument);
    CHECK_THROWS_AS(full_hamiltonian_lowest({3, 0.5, 0.5}, 4, 0), std::invalid_argument);
    CHECK_THROWS_AS(full_hamiltonian_lowest({3, 0.5, 0.5}, 4, 17), std::invalid_argument);
    CHECK_THROWS_AS(project_to_dicke({3, 0.5, 0.5}, 13), std::invalid_argument);
}

TEST_CASE("projection reproduces the banded construction") {
    std::mt19937 rng(4242);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 5; ++trial) {
        const ModelParams mp{trial % 2 ? 5 : 3, u(rng), u(rng)};
        for (int n : {4, 6, 8}) {
            const auto proj = project_to_dicke(mp, n);
            const auto sec = build_sector_hamiltonian(mp, n);
            for (size_t k = 0; k < sec.diag.size(); ++k)
                CHECK_NEAR(proj.diag[k], sec.diag[k], 1e-13);
            for (size_t k = 0; k < sec.off1.size(); ++k)
                CHECK_NEAR(proj.off1[k], sec.off1[k], 1e-13);
            for (size_t k = 0; k < sec.off2.size(); ++k)
                CHECK_NEAR(proj.off2[k], sec.off2[k], 1e-13);
        }
    }
}

TEST_CASE("sector eigenvalues are contained in the full spectrum") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 6; ++trial) {
        const ModelParams mp{trial % 2 ? 5 : 3, u(rng), u(rng)};
        for (int n : {6, 8}) {
            const auto full = full_hamiltonian_lowest(mp, n, 1 << n);
            const auto e = lowest_eigenvalues(build_sector_hamiltonian(mp, n), 2);
            for (int j = 0; j < 2; ++j) {
                const double target = n * e[j];
                double best = 1e300;
                for (double f : full.lowest)
                    best = std::min(best, std::fabs(f - target));
                CHECK(best <= 1e-10 * std::max(1.0, std::fabs(target)));
            }
        }
    }
}

TEST_CASE("ground state sits in the maximum-spin sector on the stoquastic line") {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
        const ModelParams mp{3, u(rng), 1.0};
        for (int n : {6, 8, 10}) {
            const auto full = full_hamiltonian_lowest(mp, n, 1);
            const auto e = lowest_eigenvalues(build_sector_hamiltonian(mp, n), 1);
            CHECK_NEAR(full.lowest[0], n * e[0], 1e-10 * n);
        }
    }
}
