#pragma once

#include <optional>
#include <vector>

#include "pspin/model.hpp"
#include "pspin/semiclassical.hpp"

namespace pspin {

// Gap-closing coefficient alpha at one first-order transition point, with the
// turning points, transition energy, and quadrature error estimate that
// produced it. alpha is a rate per spin in natural-log units: gap ~ e^{-alpha N}.
struct AlphaResult {
    int p = 3;
    double lambda = 1.0;
    double s_c = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    double e_c = 0.0;
    double alpha = 0.0;
    double quad_error = 0.0;
};

// Imaginary-momentum magnitude under the barrier:
//   psi_dot(m) = arccosh( ((1-s) - sqrt((1-s)^2 - 4s(1-lambda)(-s lambda m^p - E)))
//                         / (2 s (1-lambda) sqrt(1-m^2)) )
// evaluated in a cancellation-free form; for s(1-lambda) < 1e-12 the analytic
// lambda -> 1 limit arccosh((-s lambda m^p - E) / ((1-s) sqrt(1-m^2))) is used.
// Arguments below 1 - 1e-9 raise "point is classically allowed"; arguments in
// [1 - 1e-9, 1) clamp to 1 and return 0.
double psi_dot(double m, const ModelParams& params_at_transition, double e_c);

// alpha = (1/2) * integral of psi_dot over [m1, m2] at the first-order
// transition located for (p, lambda). The quadrature substitutes
// m = mid - half*cos(theta), which absorbs the sqrt endpoint behavior exactly,
// then refines a trapezoid rule by doubling until the update is <= 1e-9.
// Throws when (p, lambda) has no first-order transition.
AlphaResult alpha(int p, double lambda);

// alpha for an already-located transition point (used by sweeps that trace
// the line once and evaluate alpha along it).
AlphaResult alpha_at_transition(int p, const TransitionPoint& tp);

// Per-lambda entry of an alpha sweep; result is empty for lambda values with
// no first-order transition ("none" entries are reported, never dropped).
struct AlphaEntry {
    double lambda = 1.0;
    std::optional<AlphaResult> result;
};

// alpha over a lambda grid (any order, values in (0,1]). Transitions are
// traced by descending-lambda continuation internally; output order matches
// the input grid.
std::vector<AlphaEntry> alpha_curve(int p, const std::vector<double>& lambda_grid);

} // namespace pspin
