#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check_near.hpp"

#include <lapacke.h>

#include <cmath>
#include <random>
#include <vector>

#include "pspin/mp.hpp"
#include "pspin/sturm.hpp"

using namespace pspin;

namespace {

Pentadiagonal<double> random_penta(int n, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Pentadiagonal<double> a;
    a.diag.resize(n);
    a.off1.resize(n - 1);
    a.off2.resize(n - 2);
    for (auto& v : a.diag) v = u(rng);
    for (auto& v : a.off1) v = u(rng);
    for (auto& v : a.off2) v = u(rng);
    return a;
}

std::vector<double> dense_spectrum(const Pentadiagonal<double>& a) {
    const int n = a.size();
    std::vector<double> m(static_cast<size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) m[i * n + i] = a.diag[i];
    for (int i = 0; i + 1 < n; ++i)
        m[i * n + i + 1] = m[(i + 1) * n + i] = a.off1[i];
    for (int i = 0; i + 2 < n; ++i)
        m[i * n + i + 2] = m[(i + 2) * n + i] = a.off2[i];
    std::vector<double> w(n);
    const int info = LAPACKE_dsyev(LAPACK_ROW_MAJOR, 'N', 'U', n, m.data(), n, w.data());
    REQUIRE(info == 0);
    return w;
}

} // namespace

TEST_CASE("lowest eigenvalues match a dense solver on random matrices") {
    for (unsigned seed : {1u, 2u, 3u}) {
        const auto a = random_penta(40, seed);
        const auto ref = dense_spectrum(a);
        const auto got = lowest_eigenvalues_sturm(a, 5, 1e-13);
        for (int j = 0; j < 5; ++j) CHECK_NEAR(got[j], ref[j], 1e-11);
    }
}

TEST_CASE("count_below brackets the spectrum") {
    const auto a = random_penta(25, 11);
    const auto [lo, hi] = gershgorin_bounds(a);
    const double piv = default_pivmin(a);
    CHECK(count_below(a, lo - 1e-6, piv) == 0);
    CHECK(count_below(a, hi + 1e-6, piv) == 25);
    // Counts are monotone in x.
    int prev = 0;
    for (int k = 0; k <= 20; ++k) {
        const double x = lo + (hi - lo) * k / 20.0;
        const int c = count_below(a, x, piv);
        CHECK(c >= prev);
        prev = c;
    }
}

TEST_CASE("two_lowest agrees with the one-at-a-time path") {
    const auto a = random_penta(30, 5);
    const auto [lo, hi] = gershgorin_bounds(a);
    const double piv = default_pivmin(a);
    const auto ref = lowest_eigenvalues_sturm(a, 2, 1e-13);
    const auto [e0, e1] = two_lowest_eigenvalues(a, lo, hi, 1e-13, piv);
    CHECK_NEAR(e0, ref[0], 1e-12);
    CHECK_NEAR(e1, ref[1], 1e-12);
}

TEST_CASE("diagonal matrix is solved exactly") {
    Pentadiagonal<double> a;
    a.diag = {4.0, -2.0, 1.0, 0.5, -3.0};
    a.off1.assign(4, 0.0);
    a.off2.assign(3, 0.0);
    const auto got = lowest_eigenvalues_sturm(a, 5, 1e-15);
    const std::vector<double> want = {-3.0, -2.0, 0.5, 1.0, 4.0};
    for (int j = 0; j < 5; ++j) CHECK_NEAR(got[j], want[j], 1e-13);
}

TEST_CASE("2x2 closed form") {
    Pentadiagonal<double> a;
    a.diag = {1.0, -1.0};
    a.off1 = {0.5};
    const double r = std::sqrt(1.0 + 0.25);
    const auto got = lowest_eigenvalues_sturm(a, 2, 1e-15);
    CHECK_NEAR(got[0], -r, 1e-14);
    CHECK_NEAR(got[1], r, 1e-14);
}

TEST_CASE("argument guards") {
    const auto a = random_penta(10, 3);
    CHECK_THROWS_AS(lowest_eigenvalues_sturm(a, 0, 1e-12), std::invalid_argument);
    CHECK_THROWS_AS(lowest_eigenvalues_sturm(a, 11, 1e-12), std::invalid_argument);
}

TEST_CASE("extended-precision instantiation") {
    precision_guard guard(60);
    CHECK(machine_epsilon<mpreal>() < mpreal("1e-55"));

    // Same 2x2 as above, refined far past double precision.
    Pentadiagonal<mpreal> a;
    a.diag = {mpreal(1), mpreal(-1)};
    a.off1 = {mpreal("0.5")};
    const mpreal tol("1e-50");
    const auto got = lowest_eigenvalues_sturm(a, 2, tol);
    const mpreal r = sqrt(mpreal(1) + mpreal("0.25"));
    CHECK(abs(got[0] + r) < mpreal("1e-49"));
    CHECK(abs(got[1] - r) < mpreal("1e-49"));
}
