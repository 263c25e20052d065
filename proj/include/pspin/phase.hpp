#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pspin/semiclassical.hpp"

namespace pspin {

enum class PhaseLabel { quantum_paramagnetic, ferromagnetic };

std::string to_string(PhaseLabel label);

// Full phase diagram at fixed p: the first-order line from continuation
// tracing (descending lambda), the closed-form second-order line sampled where
// it is the actual phase boundary (lambda below the meeting point), the
// meeting lambda of the two lines, and the traced terminus. For p = 3 the
// terminus, meeting point, and second-order samples are absent.
struct PhaseDiagram {
    int p = 3;
    std::vector<TransitionPoint> first_order;            // descending lambda
    std::vector<std::pair<double, double>> second_order; // (lambda, s)
    std::optional<double> meeting_lambda;
    std::optional<CriticalPoint> terminus;               // traced, residuals zero
};

// Trace over an explicit descending lambda grid.
PhaseDiagram trace_phase_diagram(int p, const std::vector<double>& lambda_grid);

// Default grid: 201 points on [max(lambda* - 0.05, 0.01), 1], descending,
// refined x10 near the terminus and the meeting point after a first pass.
PhaseDiagram trace_phase_diagram(int p);

// Base default grid (before adaptive refinement).
std::vector<double> default_lambda_grid(int p);

// Phase label from the global minimum of U: paramagnetic when the m = 0
// minimum is the global one, ferromagnetic otherwise; ties at coexistence
// break to ferromagnetic.
PhaseLabel classify_point(int p, double s, double lambda);

} // namespace pspin
