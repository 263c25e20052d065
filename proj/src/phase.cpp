#include "pspin/phase.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pspin {

std::string to_string(PhaseLabel label) {
    return label == PhaseLabel::quantum_paramagnetic ? "quantum_paramagnetic"
                                                     : "ferromagnetic";
}

PhaseLabel classify_point(int p, double s, double lambda) {
    require_odd_p(p);
    const ModelParams pr{p, s, lambda};
    validate(pr);
    const auto mins = detail::local_minima(pr, 0.0, 1.0, 3001);
    const auto para = std::find_if(mins.begin(), mins.end(),
                                   [](const auto& mu) { return mu.first < 1e-9; });
    if (para == mins.end()) return PhaseLabel::ferromagnetic;
    for (const auto& [m, u] : mins)
        if (m >= 1e-9 && u <= para->second) return PhaseLabel::ferromagnetic;
    return PhaseLabel::quantum_paramagnetic;
}

namespace {

// lambda where the first-order line crosses the flat-curvature line
// s = 1/(3 - 2 lambda): bisection on the sign of s_c(lambda) - s2(lambda),
// bracketed by adjacent traced nodes. The sign change must be unique along
// the traced line.
std::optional<double> meeting_point(int p, const std::vector<TransitionPoint>& pts) {
    if (pts.size() < 2) return std::nullopt;
    int crossings = 0;
    double lam_above = 0.0, lam_below = 0.0;
    for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
        const double ga = pts[i].s_c - second_order_line(pts[i].lambda);
        const double gb = pts[i + 1].s_c - second_order_line(pts[i + 1].lambda);
        if ((ga < 0.0) != (gb < 0.0)) {
            ++crossings;
            lam_above = pts[i].lambda;  // descending lambda: pts[i] is larger
            lam_below = pts[i + 1].lambda;
        }
    }
    if (crossings == 0) return std::nullopt;
    if (crossings > 1)
        throw numerical_error(
            "trace_phase_diagram: multiple crossings of the first-order line "
            "with the flat-curvature line");

    double lo = lam_below, hi = lam_above;
    while (hi - lo > 1e-8) {
        const double mid = 0.5 * (lo + hi);
        const auto tp = locate_first_order(p, mid);
        if (!tp)
            throw numerical_error(
                "trace_phase_diagram: lost the first-order line while bisecting "
                "the meeting point");
        ((tp->s_c > second_order_line(mid)) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace

PhaseDiagram trace_phase_diagram(int p, const std::vector<double>& lambda_grid) {
    require_odd_p(p);
    PhaseDiagram d;
    d.p = p;

    const auto line = trace_first_order_line(p, lambda_grid);
    d.first_order = line.points;

    if (line.terminus_lambda) {
        CriticalPoint cp;
        cp.p = p;
        cp.lambda_star = *line.terminus_lambda;
        cp.s_star = *line.terminus_s;
        cp.m_star = *line.terminus_m;
        d.terminus = cp;
    }

    d.meeting_lambda = meeting_point(p, d.first_order);
    if (d.meeting_lambda) {
        d.second_order.emplace_back(*d.meeting_lambda,
                                    second_order_line(*d.meeting_lambda));
        for (const double lam : lambda_grid)
            if (lam < *d.meeting_lambda)
                d.second_order.emplace_back(lam, second_order_line(lam));
        std::sort(d.second_order.begin(), d.second_order.end(),
                  [](const auto& a, const auto& b) { return a.first > b.first; });
        d.second_order.erase(std::unique(d.second_order.begin(), d.second_order.end()),
                             d.second_order.end());
    }
    return d;
}

std::vector<double> default_lambda_grid(int p) {
    require_odd_p(p);
    double lo = 0.01;
    if (p >= 5) lo = std::max(critical_point(p).lambda_star - 0.05, 0.01);
    std::vector<double> grid(201);
    for (int i = 0; i < 201; ++i) grid[i] = 1.0 - (1.0 - lo) * i / 200.0;
    grid.back() = lo;
    return grid;
}

PhaseDiagram trace_phase_diagram(int p) {
    const auto base = default_lambda_grid(p);
    PhaseDiagram first = trace_phase_diagram(p, base);
    if (!first.terminus && !first.meeting_lambda) return first;

    // Second pass: re-trace with the base grid refined x10 in a window around
    // the terminus and the meeting point.
    const double step = (base.front() - base.back()) / (base.size() - 1.0);
    std::vector<double> grid = base;
    const auto add_window = [&](double center) {
        const double wid = 2.0 * step;
        for (int i = -20; i <= 20; ++i) {
            const double lam = center + i * (wid / 20.0);
            if (lam > 0.0 && lam <= 1.0) grid.push_back(lam);
        }
    };
    if (first.terminus) add_window(first.terminus->lambda_star);
    if (first.meeting_lambda) add_window(*first.meeting_lambda);
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return trace_phase_diagram(p, grid);
}

}  // namespace pspin
