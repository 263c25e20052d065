#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "check_near.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "pspin/gapalpha.hpp"
#include "pspin/semiclassical.hpp"

using namespace pspin;

TEST_CASE("psi_dot basics at the p=3, lambda=1 transition") {
    const auto tp = locate_first_order(3, 1.0);
    REQUIRE(tp.has_value());
    const ModelParams mp{3, tp->s_c, 1.0};
    const double mid = 0.5 * (tp->m1 + tp->m2);
    CHECK(psi_dot(mid, mp, tp->e_c) > 0.1);
    CHECK(psi_dot(tp->m1 + 1e-6, mp, tp->e_c) < 1e-2);
    CHECK(psi_dot(tp->m2 - 1e-6, mp, tp->e_c) < 1e-2);
    // Energies above the barrier are classically allowed: no decay rate.
    CHECK_THROWS_AS(psi_dot(mid, mp, tp->e_c + 0.5), std::domain_error);
    CHECK_THROWS_AS(psi_dot(1.5, mp, tp->e_c), std::invalid_argument);
    CHECK_THROWS_AS(psi_dot(0.5, {3, 1.0, 1.0}, -0.5), std::invalid_argument);
}

TEST_CASE("psi_dot continuous across the lambda -> 1 switchover") {
    const auto tp = locate_first_order(3, 1.0);
    REQUIRE(tp.has_value());
    const double mid = 0.5 * (tp->m1 + tp->m2);
    const double at1 = psi_dot(mid, {3, tp->s_c, 1.0}, tp->e_c);
    const double near1 = psi_dot(mid, {3, tp->s_c, 1.0 - 1e-9}, tp->e_c);
    CHECK(near1 == doctest::Approx(at1).epsilon(1e-6));
}

TEST_CASE("alpha reproduces frozen reference values") {
    struct Ref {
        int p;
        double lambda, s_c, alpha, tol;
    };
    const std::vector<Ref> refs = {
        {3, 1.0, 0.43496451735, 0.08676644832, 1e-7},
        {5, 0.8, 0.46236181379, 0.16985800472, 1e-7},
        {5, 1.0, 0.46845799921, 0.18577204587, 1e-7},
        {5, 0.4, 0.43643698, 0.091697, 2e-5},
        {11, 1.0, 0.48748169949, 0.27242220032, 1e-7},
    };
    for (const auto& r : refs) {
        CAPTURE(r.p);
        CAPTURE(r.lambda);
        const auto a = alpha(r.p, r.lambda);
        CHECK(a.s_c == doctest::Approx(r.s_c).epsilon(r.tol));
        CHECK(a.alpha == doctest::Approx(r.alpha).epsilon(r.tol));
        CHECK(a.quad_error <= 1e-8);
        CHECK(a.m1 < a.m2);
    }
    const auto a11 = alpha(11, 1.0);
    CHECK(a11.m2 == doctest::Approx(std::sqrt(0.99)).epsilon(1e-7));
}

TEST_CASE("alpha rejects parameters without a first-order transition") {
    CHECK_THROWS_AS(alpha(5, 0.2), std::domain_error);
    CHECK_THROWS_AS(alpha(4, 0.5), std::invalid_argument);
    CHECK_THROWS_AS(alpha(5, 0.0), std::invalid_argument);
}

TEST_CASE("alpha vanishes as (lambda - lambda*)^{3/2} at the terminus") {
    const auto cp = critical_point(11);
    const double d1 = 1e-3, d2 = 3e-4;
    const double a1 = alpha(11, cp.lambda_star + d1).alpha;
    const double a2 = alpha(11, cp.lambda_star + d2).alpha;
    const double exponent = std::log(a1 / a2) / std::log(d1 / d2);
    CHECK_NEAR(exponent, 1.5, 0.02);
}

TEST_CASE("alpha_at_transition matches alpha") {
    const auto tp = locate_first_order(5, 0.9);
    REQUIRE(tp.has_value());
    const auto direct = alpha_at_transition(5, *tp);
    const auto full = alpha(5, 0.9);
    CHECK(direct.alpha == doctest::Approx(full.alpha).epsilon(1e-10));
    CHECK_THROWS_AS(alpha_at_transition(5,
                                        [&] {
                                            auto bad = *tp;
                                            bad.m1 = bad.m2 + 0.1;
                                            return bad;
                                        }()),
                    std::invalid_argument);
}

TEST_CASE("alpha_curve preserves grid order and reports gaps in coverage") {
    const auto curve = alpha_curve(5, {0.2, 0.6, 1.0});
    REQUIRE(curve.size() == 3);
    CHECK(curve[0].lambda == 0.2);
    CHECK_FALSE(curve[0].result.has_value());
    REQUIRE(curve[1].result.has_value());
    CHECK(curve[1].result->alpha == doctest::Approx(0.14407202).epsilon(1e-6));
    REQUIRE(curve[2].result.has_value());
    CHECK(curve[2].result->alpha == doctest::Approx(0.18577204587).epsilon(1e-7));
    CHECK(alpha_curve(3, {}).empty());
    CHECK_THROWS_AS(alpha_curve(5, {0.5, 0.0}), std::invalid_argument);
    const auto single = alpha_curve(3, {0.3});
    REQUIRE(single.size() == 1);
    CHECK(single[0].result.has_value());
}
