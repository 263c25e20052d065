#include "pspin/gapalpha.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <vector>

namespace pspin {

double psi_dot(double m, const ModelParams& params, double e_c) {
    validate(params);
    if (!(std::abs(m) < 1.0))
        throw std::invalid_argument("psi_dot: m must lie strictly inside (-1, 1)");
    const double s = params.s;
    const double om = std::sqrt(1.0 - m * m);
    const double x = s * (1.0 - params.lambda);
    const double num = -s * params.lambda * ipow(m, params.p) - e_c;

    double arg;
    if (x < 1e-12) {
        if (1.0 - s <= 0.0)
            throw std::invalid_argument("psi_dot: no kinetic term at s = 1, lambda = 1");
        arg = num / ((1.0 - s) * om);
    } else {
        const double y = 4.0 * x * num;
        double disc = (1.0 - s) * (1.0 - s) - y;
        if (disc < 0.0) {
            if (disc < -1e-14 * std::max(1.0, std::abs(y)))
                throw numerical_error("psi_dot: discriminant is negative beyond roundoff");
            disc = 0.0;
        }
        arg = y / (om * 2.0 * x * ((1.0 - s) + std::sqrt(disc)));
    }

    if (arg < 1.0 - 1e-9)
        throw std::domain_error("psi_dot: point is classically allowed at this energy");
    if (arg < 1.0) return 0.0;
    return std::acosh(arg);
}

AlphaResult alpha_at_transition(int p, const TransitionPoint& tp) {
    require_odd_p(p);
    if (!(tp.m1 < tp.m2))
        throw std::invalid_argument("alpha_at_transition: turning points must satisfy m1 < m2");
    const ModelParams pr{p, tp.s_c, tp.lambda};
    validate(pr);

    AlphaResult res;
    res.p = p;
    res.lambda = tp.lambda;
    res.s_c = tp.s_c;
    res.m1 = tp.m1;
    res.m2 = tp.m2;
    res.e_c = tp.e_c;

    // m = mid - half cos(theta): the substitution absorbs the sqrt vanishing
    // of psi_dot at both turning points, leaving a smooth integrand in theta.
    const double mid = 0.5 * (tp.m1 + tp.m2);
    const double half = 0.5 * (tp.m2 - tp.m1);
    const double pi = std::acos(-1.0);
    const auto g = [&](double theta) {
        const double m = std::clamp(mid - half * std::cos(theta), tp.m1, tp.m2);
        return psi_dot(m, pr, tp.e_c) * half * std::sin(theta);
    };

    // Composite trapezoid with interval doubling; endpoint values vanish.
    long n = 64;
    double h = pi / n;
    double sum = 0.0;
    for (long i = 1; i < n; ++i) sum += g(i * h);
    double t_prev = h * sum;
    const long n_cap = 1L << 20;
    while (true) {
        double odd = 0.0;
        for (long i = 0; i < n; ++i) odd += g((i + 0.5) * h);
        const double t = 0.5 * t_prev + 0.5 * h * odd;
        n *= 2;
        h *= 0.5;
        const double delta = std::abs(t - t_prev) * 0.5;  // error on alpha = t/2
        t_prev = t;
        if (delta <= 1e-9 && n > 256) {
            res.alpha = 0.5 * t;
            res.quad_error = delta;
            return res;
        }
        if (n >= n_cap) {
            std::ostringstream msg;
            msg << "alpha quadrature failed to converge below 1e-9 (last update "
                << delta << ", estimate " << 0.5 * t << ")";
            throw numerical_error(msg.str());
        }
    }
}

AlphaResult alpha(int p, double lambda) {
    const auto tp = locate_first_order(p, lambda);
    if (!tp) {
        std::ostringstream msg;
        msg << "alpha: no first-order transition at p = " << p
            << ", lambda = " << lambda;
        throw std::domain_error(msg.str());
    }
    return alpha_at_transition(p, *tp);
}

std::vector<AlphaEntry> alpha_curve(int p, const std::vector<double>& lambda_grid) {
    require_odd_p(p);
    if (lambda_grid.empty()) return {};
    for (const double lam : lambda_grid)
        if (!(lam > 0.0 && lam <= 1.0))
            throw std::invalid_argument("alpha_curve: every lambda must lie in (0, 1]");

    const auto line = trace_first_order_line(p, lambda_grid);
    std::unordered_map<double, const TransitionPoint*> located;
    for (const auto& tp : line.points) located.emplace(tp.lambda, &tp);

    std::vector<AlphaEntry> out;
    out.reserve(lambda_grid.size());
    for (const double lam : lambda_grid) {
        AlphaEntry entry;
        entry.lambda = lam;
        if (const auto it = located.find(lam); it != located.end())
            entry.result = alpha_at_transition(p, *it->second);
        out.push_back(std::move(entry));
    }
    return out;
}

}  // namespace pspin
