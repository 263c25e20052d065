#pragma once

#include <utility>
#include <vector>

#include "pspin/dicke.hpp"

namespace pspin {

// Gap curve of the full Hamiltonian H = N*E along an s-grid at fixed (p, lambda).
// Samples hold (s, E1 - E0) in extensive energy units, so gap = 2 exactly at s = 0.
struct GapCurve {
    double lambda = 1.0;
    int n_spins = 0;
    std::vector<std::pair<double, double>> samples;  // (s, gap)
};

struct MinGapResult {
    double s_min = 0.0;
    double gap_min = 0.0;  // extensive (full-Hamiltonian) gap
};

// Least-squares line through (N, ln gap_min): slope estimates -alpha for
// gap_min ~ exp(-alpha N).
struct GapScalingFit {
    std::vector<std::pair<int, double>> points;  // (n_spins, min_gap)
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

// k smallest eigenvalues of the per-spin sector matrix, ascending.
// Bisection on Sturm counts of the banded matrix: O(N) per count, never dense.
std::vector<double> lowest_eigenvalues(const SectorHamiltonian& h, int k);

// Gap E1 - E0 of H = N*E at each grid point. The grid must be strictly
// increasing inside [0, 1]. Eigensolver failures are rethrown with the
// offending s in the message.
GapCurve gap_curve(int p, double lambda, int n_spins,
                   const std::vector<double>& s_grid);

// Minimum of the gap over an s-bracket: coarse grid scan (default 101 points),
// golden-section refinement, then a quadratic-vertex polish on gap(s)^2 in
// extended precision so exponentially small minima keep full relative
// accuracy. Throws "no interior minimum" when the coarse scan bottoms out at
// a bracket endpoint.
MinGapResult min_gap(int p, double lambda, int n_spins,
                     std::pair<double, double> s_bracket,
                     int coarse_points = 101, double s_tol = 1e-8);

// Requires >= 3 points, strictly increasing n_spins, all gaps > 0.
GapScalingFit fit_gap_scaling(const std::vector<std::pair<int, double>>& points);

} // namespace pspin
