#pragma once

#include <array>
#include <optional>
#include <utility>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

// All local extrema of the classical potential U on [-1, 1].
// m0 is present only when 1 - s < 2 s (1 - lambda), i.e. when the flat-bottom
// branch U2 covers |m| <= m0.
struct PotentialLandscape {
    ModelParams params;
    std::vector<std::pair<double, double>> minima;  // (m, U), ascending in m
    std::vector<std::pair<double, double>> maxima;  // (m, U), ascending in m
    std::optional<double> m0;
};

enum class TransitionOrder { first, second };

// A located phase-boundary point at fixed lambda. For first order, m1 < m2
// are the degenerate minima and e_c their common potential value.
struct TransitionPoint {
    double lambda = 1.0;
    double s_c = 0.0;
    TransitionOrder order = TransitionOrder::first;
    double m1 = 0.0;
    double m2 = 0.0;
    double e_c = 0.0;
};

// Closed-form terminus of the first-order line (p odd >= 5). theta_residuals
// holds the numerically checked first/second/third theta-derivatives of
// U1(cos theta) at the point; they are filled by critical_point() and left
// zero when the struct is produced by line tracing.
struct CriticalPoint {
    int p = 5;
    double m_star = 0.0;
    double lambda_star = 0.0;
    double s_star = 0.0;
    std::array<double, 3> theta_residuals{};
};

// U1(m) = -s lambda m^p - (1-s) sqrt(1-m^2) + s(1-lambda)(1-m^2).
double potential_u1(double m, const ModelParams& params);

// dU1/dm (analytic).
double potential_u1_deriv(double m, const ModelParams& params);

// U(m): U1 outside |m| < m0, U2(m) = -s lambda m^p - (1-s)^2/(4 s (1-lambda))
// inside, continuous at |m| = m0. Falls back to U1 everywhere when the U2
// branch does not exist (1 - s >= 2 s (1 - lambda)).
double potential_u(double m, const ModelParams& params);

// dU/dm with the same branch split (C^1 at |m| = m0).
double potential_u_deriv(double m, const ModelParams& params);

// m0 = sqrt(1 - ((1-s)/(2s(1-lambda)))^2) when 1 - s < 2 s (1-lambda).
std::optional<double> branch_m0(const ModelParams& params);

// Dense grid (default 10^4 points) + derivative bisection, endpoint extrema
// included; extrema resolved to |m| resolution well below 1e-10.
PotentialLandscape find_landscape(const ModelParams& params, int grid_points = 10000);

// First-order transition at fixed lambda: bisection in s on the signed
// difference of the two lowest minimum values of U over m >= 0 (for odd p the
// mirror minima at m < 0 are strictly metastable and never participate).
// Returns nullopt when no s in (0,1) exhibits coexisting minima.
// Rejects even p and lambda = 0.
std::optional<TransitionPoint> locate_first_order(int p, double lambda);

// Warm-started variant used by continuation tracing: searches s in
// [s_center - s_halfwidth, s_center + s_halfwidth] with minima scanned over
// [m_lo, m_hi]. expected_dm scales the jump-detection threshold.
// band_halfwidth is the measured half-width in s of the coexistence
// (two-minima) window around s_c.
struct WarmLocateResult {
    TransitionPoint point;
    double band_halfwidth = 0.0;
};
std::optional<WarmLocateResult> locate_first_order_warm(int p, double lambda,
                                                        double s_center,
                                                        double s_halfwidth,
                                                        double m_lo, double m_hi,
                                                        int scan_points = 401,
                                                        double expected_dm = 0.05);

// Closed form s = 1/(3 - 2 lambda) of the second-order line.
double second_order_line(double lambda);

// Numeric onset of the flat-quartic minimum at m = 0: bisection in s on the
// sign of a central finite-difference estimate of U1''(0).
double second_order_onset(int p, double lambda);

// Closed-form critical point for p odd >= 5, with the three theta-derivative
// residuals of U1(cos theta) checked to <= 1e-8 in extended precision
// (numerical_error otherwise). p = 3 throws "no critical point".
CriticalPoint critical_point(int p);

// First-order line traced by warm-started continuation over a descending
// lambda grid. If the line ends inside the grid, the terminus is refined by
// bisection in lambda (to ~1e-7) and reported via the traced fields.
struct TracedLine {
    std::vector<TransitionPoint> points;       // descending lambda
    std::optional<double> terminus_lambda;
    std::optional<double> terminus_s;
    std::optional<double> terminus_m;
};
TracedLine trace_first_order_line(int p, const std::vector<double>& lambda_grid);

namespace detail {

// Local minima of U over [m_lo, m_hi] by derivative-sign scan + bisection.
std::vector<std::pair<double, double>> local_minima(const ModelParams& params,
                                                    double m_lo, double m_hi,
                                                    int grid_points);

} // namespace detail

} // namespace pspin
