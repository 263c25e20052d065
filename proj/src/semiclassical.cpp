#include "pspin/semiclassical.hpp"
#include "pspin/mp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pspin {

namespace {

void check_m(double m) {
    if (!(std::abs(m) <= 1.0))
        throw std::invalid_argument("potential: magnetization m must lie in [-1, 1]");
}

}  // namespace

double potential_u1(double m, const ModelParams& params) {
    validate(params);
    check_m(m);
    const double om2 = 1.0 - m * m;
    return -params.s * params.lambda * ipow(m, params.p)
         - (1.0 - params.s) * std::sqrt(om2)
         + params.s * (1.0 - params.lambda) * om2;
}

double potential_u1_deriv(double m, const ModelParams& params) {
    validate(params);
    check_m(m);
    double d = -params.p * params.s * params.lambda * ipow(m, params.p - 1)
             - 2.0 * params.s * (1.0 - params.lambda) * m;
    if (params.s < 1.0) {
        const double om2 = 1.0 - m * m;
        if (om2 <= 0.0)  // the transverse-field term dominates at the poles
            return m > 0.0 ? std::numeric_limits<double>::infinity()
                           : -std::numeric_limits<double>::infinity();
        d += (1.0 - params.s) * m / std::sqrt(om2);
    }
    return d;
}

std::optional<double> branch_m0(const ModelParams& params) {
    validate(params);
    const double x = params.s * (1.0 - params.lambda);
    if (!(1.0 - params.s < 2.0 * x)) return std::nullopt;
    const double r = (1.0 - params.s) / (2.0 * x);
    return std::sqrt(1.0 - r * r);
}

double potential_u(double m, const ModelParams& params) {
    const auto m0 = branch_m0(params);
    check_m(m);
    if (m0 && std::abs(m) <= *m0) {
        const double x = params.s * (1.0 - params.lambda);
        return -params.s * params.lambda * ipow(m, params.p)
             - (1.0 - params.s) * (1.0 - params.s) / (4.0 * x);
    }
    return potential_u1(m, params);
}

double potential_u_deriv(double m, const ModelParams& params) {
    const auto m0 = branch_m0(params);
    check_m(m);
    if (m0 && std::abs(m) <= *m0)
        return -params.p * params.s * params.lambda * ipow(m, params.p - 1);
    return potential_u1_deriv(m, params);
}

namespace {

struct Extremum {
    double m = 0.0;
    double u = 0.0;
    bool is_min = false;
};

double bisect_deriv_root(const ModelParams& pr, double a, double b, int sign_a) {
    // du changes sign on [a, b]; returns the root to ~1e-13 in m.
    for (int it = 0; it < 200 && b - a > 1e-13; ++it) {
        const double mid = 0.5 * (a + b);
        const double d = potential_u_deriv(mid, pr);
        if (d == 0.0) return mid;
        if ((d > 0.0 ? 1 : -1) == sign_a)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

// All extrema of U on [m_lo, m_hi], ascending in m. Interior extrema come
// from sign changes of dU/dm refined by bisection; the window edges are
// classified by the derivative just inside. For s < 1 the derivative diverges
// at m = +-1, so a pole can never be a minimum: when the last uniform sample
// still points downhill toward a pole, the sign flip is hunted geometrically
// into the boundary layer (whose width (1-s)^2 can be far below the grid step).
std::vector<Extremum> scan_extrema(const ModelParams& pr, double m_lo, double m_hi,
                                   int grid_points) {
    const int n = std::max(grid_points, 16);
    const double h = (m_hi - m_lo) / (n - 1);

    std::vector<std::pair<double, int>> samples;  // (m, sign of dU/dm), nonzero
    samples.reserve(n);
    const auto sample = [&](double m) {
        const double d = potential_u_deriv(m, pr);
        const int sign = d > 0.0 ? 1 : (d < 0.0 ? -1 : 0);
        if (sign != 0) samples.emplace_back(m, sign);
    };
    sample(m_lo + 0.5 * h);
    for (int i = 1; i < n - 1; ++i) sample(m_lo + i * h);
    sample(m_hi - 0.5 * h);

    if (m_hi == 1.0 && pr.s < 1.0 && !samples.empty() && samples.back().second < 0) {
        double gap = 0.25 * h;
        while (gap > 1e-15) {
            const double m = 1.0 - gap;
            if (potential_u_deriv(m, pr) > 0.0) {
                samples.emplace_back(m, 1);
                break;
            }
            gap *= 0.5;
        }
    }
    if (m_lo == -1.0 && pr.s < 1.0 && !samples.empty() && samples.front().second > 0) {
        double gap = 0.25 * h;
        while (gap > 1e-15) {
            const double m = -1.0 + gap;
            if (potential_u_deriv(m, pr) < 0.0) {
                samples.emplace(samples.begin(), m, -1);
                break;
            }
            gap *= 0.5;
        }
    }

    std::vector<Extremum> out;
    if (samples.empty()) {
        // Derivative identically zero across the window: flat potential.
        out.push_back({m_lo, potential_u(m_lo, pr), true});
        return out;
    }
    out.push_back({m_lo, potential_u(m_lo, pr), samples.front().second > 0});
    for (std::size_t i = 0; i + 1 < samples.size(); ++i) {
        if (samples[i].second != samples[i + 1].second) {
            const double root = bisect_deriv_root(pr, samples[i].first,
                                                  samples[i + 1].first,
                                                  samples[i].second);
            out.push_back({root, potential_u(root, pr), samples[i].second < 0});
        }
    }
    out.push_back({m_hi, potential_u(m_hi, pr), samples.back().second < 0});
    return out;
}

// Two lowest minima of U over a window, ordered by m. Used for coexistence
// detection; the signed value difference changes sign at the transition.
struct Coexist {
    double ma = 0.0, ua = 0.0;  // smaller-m branch
    double mb = 0.0, ub = 0.0;  // larger-m branch
};

std::optional<Coexist> coexisting_minima(const ModelParams& pr, double m_lo,
                                         double m_hi, int grid_points) {
    const auto mins = detail::local_minima(pr, m_lo, m_hi, grid_points);
    if (mins.size() < 2) return std::nullopt;
    std::size_t i0 = 0, i1 = 1;
    if (mins[i1].second < mins[i0].second) std::swap(i0, i1);
    for (std::size_t i = 2; i < mins.size(); ++i) {
        if (mins[i].second < mins[i0].second) {
            i1 = i0;
            i0 = i;
        } else if (mins[i].second < mins[i1].second) {
            i1 = i;
        }
    }
    if (mins[i0].first > mins[i1].first) std::swap(i0, i1);
    return Coexist{mins[i0].first, mins[i0].second, mins[i1].first, mins[i1].second};
}

double global_min_m(const ModelParams& pr, double m_lo, double m_hi, int grid_points) {
    const auto mins = detail::local_minima(pr, m_lo, m_hi, grid_points);
    if (mins.empty())
        throw numerical_error("potential landscape scan found no minimum");
    double best_m = mins[0].first, best_u = mins[0].second;
    for (const auto& [m, u] : mins)
        if (u < best_u) {
            best_u = u;
            best_m = m;
        }
    return best_m;
}

ModelParams at_s(int p, double lambda, double s) { return ModelParams{p, s, lambda}; }

// Side classifier for the transition bisection: true once the larger-m branch
// is the global minimum. Falls back to the global-minimum position when only
// one minimum survives at this s.
bool ferro_side(int p, double lambda, double s, double m_lo, double m_hi, int grid,
                double m_split) {
    const auto pr = at_s(p, lambda, s);
    if (const auto c = coexisting_minima(pr, m_lo, m_hi, grid))
        return c->ua >= c->ub;
    return global_min_m(pr, m_lo, m_hi, grid) > m_split;
}

// Bisects the ferro-side predicate to the degeneracy point and reads off the
// coexisting minima there. Returns nullopt when the bisection converges onto
// a steep but continuous crossover (single minimum throughout), which is what
// the magnetization-jump detector sees just past the terminus of the line.
std::optional<TransitionPoint> extract_transition(int p, double lambda, double sa,
                                                  double sb, double m_split,
                                                  double m_lo, double m_hi,
                                                  int grid) {
    for (int it = 0; it < 120 && sb - sa > 1e-16; ++it) {
        const double mid = 0.5 * (sa + sb);
        if (mid <= sa || mid >= sb) break;
        if (ferro_side(p, lambda, mid, m_lo, m_hi, grid, m_split))
            sb = mid;
        else
            sa = mid;
    }
    const double s_c = 0.5 * (sa + sb);
    const auto c = coexisting_minima(at_s(p, lambda, s_c), m_lo, m_hi, grid);
    if (!c) return std::nullopt;
    if (std::abs(c->ua - c->ub) > 1e-10)
        throw numerical_error("first-order transition: minima fail degeneracy tolerance at s_c");
    TransitionPoint tp;
    tp.lambda = lambda;
    tp.s_c = s_c;
    tp.order = TransitionOrder::first;
    tp.m1 = c->ma;
    tp.m2 = c->mb;
    tp.e_c = 0.5 * (c->ua + c->ub);
    return tp;
}

struct Probe {
    double s = 0.0;
    double m_glob = 0.0;
    double phi = 0.0;
    bool coex = false;
};

Probe probe_at(int p, double lambda, double s, double m_lo, double m_hi, int grid) {
    Probe pb;
    pb.s = s;
    const auto pr = at_s(p, lambda, s);
    if (const auto c = coexisting_minima(pr, m_lo, m_hi, grid)) {
        pb.coex = true;
        pb.phi = c->ua - c->ub;
        pb.m_glob = pb.phi >= 0.0 ? c->mb : c->ma;
    } else {
        pb.m_glob = global_min_m(pr, m_lo, m_hi, grid);
    }
    return pb;
}

// Distinguishes a genuine magnetization discontinuity from the steep but
// continuous growth just past a second-order onset: rescanning at 200x finer
// resolution shrinks a continuous step roughly as sqrt(step), while a true
// jump keeps its size.
std::optional<std::pair<Probe, Probe>> refine_jump(int p, double lambda, Probe a,
                                                   Probe b, int grid) {
    const double jump0 = std::abs(b.m_glob - a.m_glob);
    for (int level = 0; level < 3; ++level) {
        const int n = 201;
        const double h = (b.s - a.s) / (n - 1);
        if (h < 1e-12) break;
        Probe prev = a;
        Probe best_a = a, best_b = b;
        double best_jump = 0.0;
        for (int i = 1; i < n; ++i) {
            const double s = a.s + i * h;
            const Probe cur = i == n - 1 ? b : probe_at(p, lambda, s, 0.0, 1.0, grid);
            if (prev.coex && cur.coex && (prev.phi < 0.0) != (cur.phi < 0.0))
                return std::make_pair(prev, cur);
            const double j = std::abs(cur.m_glob - prev.m_glob);
            if (j > best_jump) {
                best_jump = j;
                best_a = prev;
                best_b = cur;
            }
            prev = cur;
        }
        if (best_jump < 0.5 * jump0) return std::nullopt;  // continuous growth
        a = best_a;
        b = best_b;
    }
    return std::make_pair(a, b);
}

// Half-width in s of the window around s_c in which both minima coexist.
double measure_band(int p, double lambda, double s_c, double m_lo, double m_hi,
                    int grid, double reach) {
    const auto coex_at = [&](double s) {
        if (!(s > 0.0 && s < 1.0)) return false;
        return coexisting_minima(at_s(p, lambda, s), m_lo, m_hi, grid).has_value();
    };
    double half = 0.0;
    for (const double dir : {+1.0, -1.0}) {
        double d = std::max(reach * 1e-3, 1e-13);
        while (d < reach && coex_at(s_c + dir * d)) d *= 2.0;
        double lo = 0.5 * d, hi = std::min(d, reach);
        if (coex_at(s_c + dir * hi)) {
            half += hi;
            continue;
        }
        for (int it = 0; it < 60 && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (coex_at(s_c + dir * mid) ? lo : hi) = mid;
        }
        half += 0.5 * (lo + hi);
    }
    return 0.5 * half;
}

}  // namespace

namespace detail {

std::vector<std::pair<double, double>> local_minima(const ModelParams& params,
                                                    double m_lo, double m_hi,
                                                    int grid_points) {
    validate(params);
    if (!(m_lo >= -1.0 && m_hi <= 1.0 && m_lo < m_hi))
        throw std::invalid_argument("local_minima: window must satisfy -1 <= m_lo < m_hi <= 1");
    std::vector<std::pair<double, double>> mins;
    for (const auto& e : scan_extrema(params, m_lo, m_hi, grid_points))
        if (e.is_min) mins.emplace_back(e.m, e.u);
    return mins;
}

}  // namespace detail

PotentialLandscape find_landscape(const ModelParams& params, int grid_points) {
    validate(params);
    require_odd_p(params.p);
    if (grid_points < 16)
        throw std::invalid_argument("find_landscape: grid_points must be at least 16");
    PotentialLandscape out;
    out.params = params;
    for (const auto& e : scan_extrema(params, -1.0, 1.0, grid_points)) {
        if (e.is_min)
            out.minima.emplace_back(e.m, e.u);
        else
            out.maxima.emplace_back(e.m, e.u);
    }
    out.m0 = branch_m0(params);
    return out;
}

std::optional<TransitionPoint> locate_first_order(int p, double lambda) {
    require_odd_p(p);
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument(
            "locate_first_order: lambda must lie in (0, 1]; at lambda = 0 the "
            "longitudinal term vanishes and no symmetry-broken branch exists");

    const int ns = 2001;
    const int grid = 3001;
    std::vector<Probe> pr(ns);
    for (int i = 0; i < ns; ++i)
        pr[i] = probe_at(p, lambda, (i + 1.0) / (ns + 1.0), 0.0, 1.0, grid);

    for (int i = 0; i + 1 < ns; ++i) {
        const Probe& a = pr[i];
        const Probe& b = pr[i + 1];
        if (a.coex && b.coex && (a.phi < 0.0) != (b.phi < 0.0)) {
            const double split = 0.5 * (a.m_glob + b.m_glob);
            if (auto tp = extract_transition(p, lambda, a.s, b.s, split, 0.0, 1.0, grid))
                return tp;
        } else if (std::abs(b.m_glob - a.m_glob) > 0.01) {
            const auto refined = refine_jump(p, lambda, a, b, grid);
            if (!refined) continue;  // continuous second-order growth
            const auto& [ra, rb] = *refined;
            const double split = 0.5 * (ra.m_glob + rb.m_glob);
            if (auto tp = extract_transition(p, lambda, ra.s, rb.s, split, 0.0, 1.0, grid))
                return tp;
        }
    }
    return std::nullopt;
}

std::optional<WarmLocateResult> locate_first_order_warm(int p, double lambda,
                                                        double s_center,
                                                        double s_halfwidth,
                                                        double m_lo, double m_hi,
                                                        int scan_points,
                                                        double expected_dm) {
    require_odd_p(p);
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("locate_first_order_warm: lambda must lie in (0, 1]");
    if (!(s_halfwidth > 0.0) || scan_points < 8)
        throw std::invalid_argument("locate_first_order_warm: bad search window");
    m_lo = std::max(m_lo, 0.0);
    m_hi = std::min(m_hi, 1.0);
    if (!(m_lo < m_hi))
        throw std::invalid_argument("locate_first_order_warm: empty m window");

    const double sa = std::max(s_center - s_halfwidth, 1e-9);
    const double sb = std::min(s_center + s_halfwidth, 1.0 - 1e-9);
    if (!(sa < sb)) return std::nullopt;

    const int grid = 2001;
    const double jump_thresh = std::max(1e-7, 0.2 * expected_dm);
    std::vector<Probe> pr(scan_points);
    for (int i = 0; i < scan_points; ++i)
        pr[i] = probe_at(p, lambda, sa + (sb - sa) * i / (scan_points - 1.0), m_lo,
                         m_hi, grid);

    for (int i = 0; i + 1 < scan_points; ++i) {
        const Probe& a = pr[i];
        const Probe& b = pr[i + 1];
        const bool flip = a.coex && b.coex && (a.phi < 0.0) != (b.phi < 0.0);
        const bool jump = std::abs(b.m_glob - a.m_glob) > jump_thresh;
        if (!flip && !jump) continue;
        const double split = 0.5 * (a.m_glob + b.m_glob);
        const auto point = extract_transition(p, lambda, a.s, b.s, split, m_lo, m_hi, grid);
        if (!point) return std::nullopt;  // steep continuous crossover, no transition
        WarmLocateResult res;
        res.point = *point;
        res.band_halfwidth =
            measure_band(p, lambda, res.point.s_c, m_lo, m_hi, grid, 2.0 * s_halfwidth);
        return res;
    }
    return std::nullopt;
}

double second_order_line(double lambda) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("second_order_line: lambda must lie in [0, 1]");
    return 1.0 / (3.0 - 2.0 * lambda);
}

double second_order_onset(int p, double lambda) {
    require_odd_p(p);
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw std::invalid_argument("second_order_onset: lambda must lie in [0, 1]");
    // Curvature of the paramagnetic minimum via a central difference; the odd
    // longitudinal term drops out of the symmetric stencil exactly.
    const double h = 1e-4;
    const auto curvature_positive = [&](double s) {
        const ModelParams pr{p, s, lambda};
        const double f =
            potential_u1(h, pr) + potential_u1(-h, pr) - 2.0 * potential_u1(0.0, pr);
        return f > 0.0;
    };
    double lo = 0.0, hi = 1.0;
    if (!curvature_positive(1e-12)) return 0.0;
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        (curvature_positive(mid) ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

namespace {

mpreal mp_ipow(const mpreal& x, int n) {
    mpreal r(1);
    mpreal b = x;
    for (int e = n; e > 0; e >>= 1) {
        if (e & 1) r *= b;
        b *= b;
    }
    return r;
}

}  // namespace

CriticalPoint critical_point(int p) {
    require_odd_p(p);
    if (p == 3)
        throw std::domain_error(
            "critical_point: p = 3 has no critical point; the transition line "
            "stays first order all the way to lambda = 0");

    CriticalPoint cp;
    cp.p = p;
    const double m_star = std::sqrt((p - 4.0) / (p - 1.0));
    const double q = p * ipow(m_star, p - 4);
    cp.m_star = m_star;
    cp.lambda_star = 1.0 / (1.0 + q);
    cp.s_star =
        (1.0 + q) /
        (1.0 + q * (1.0 + std::sqrt(3.0 / (p - 1.0)) * (m_star * m_star + 2.0)));

    // Verify that the angular potential is flat through third order at the
    // critical point, with high-precision central differences.
    precision_guard guard(60);
    const mpreal mp_m = sqrt(mpreal(p - 4) / mpreal(p - 1));
    const mpreal mp_q = p * mp_ipow(mp_m, p - 4);
    const mpreal mp_lambda = mpreal(1) / (1 + mp_q);
    const mpreal mp_s =
        (1 + mp_q) / (1 + mp_q * (1 + sqrt(mpreal(3) / (p - 1)) * (mp_m * mp_m + 2)));
    const mpreal theta = acos(mp_m);
    const auto f = [&](const mpreal& t) {
        const mpreal st = sin(t);
        return -mp_s * mp_lambda * mp_ipow(cos(t), p) - (1 - mp_s) * st +
               mp_s * (1 - mp_lambda) * st * st;
    };
    const mpreal hh = mpreal(1) / 10000000000LL;  // 1e-10
    const mpreal fp1 = f(theta + hh), fm1 = f(theta - hh);
    const mpreal fp2 = f(theta + 2 * hh), fm2 = f(theta - 2 * hh);
    const mpreal f0 = f(theta);
    cp.theta_residuals[0] = std::abs(static_cast<double>((fp1 - fm1) / (2 * hh)));
    cp.theta_residuals[1] =
        std::abs(static_cast<double>((fp1 - 2 * f0 + fm1) / (hh * hh)));
    cp.theta_residuals[2] = std::abs(
        static_cast<double>((fp2 - 2 * fp1 + 2 * fm1 - fm2) / (2 * hh * hh * hh)));
    for (const double r : cp.theta_residuals)
        if (!(r <= 1e-8))
            throw numerical_error(
                "critical_point: angular derivative residual exceeds 1e-8");
    return cp;
}

namespace {

// Quadratic Lagrange extrapolation through the most recent (up to three) nodes.
double extrapolate(const std::vector<std::pair<double, double>>& xy, double x) {
    const std::size_t n = xy.size();
    if (n == 1) return xy[0].second;
    const std::size_t k = std::min<std::size_t>(n, 3);
    double y = 0.0;
    for (std::size_t i = n - k; i < n; ++i) {
        double w = 1.0;
        for (std::size_t j = n - k; j < n; ++j) {
            if (j == i) continue;
            w *= (x - xy[j].first) / (xy[i].first - xy[j].first);
        }
        y += w * xy[i].second;
    }
    return y;
}

struct TraceState {
    std::vector<std::pair<double, double>> s_nodes;   // (lambda, s_c)
    std::vector<std::pair<double, double>> m1_nodes;  // (lambda, m1)
    std::vector<std::pair<double, double>> m2_nodes;  // (lambda, m2)
    double band_last = 0.0;
    double dm_last = 0.0;
    double lambda_last = 0.0;

    void push(const TransitionPoint& tp, double band) {
        s_nodes.emplace_back(tp.lambda, tp.s_c);
        m1_nodes.emplace_back(tp.lambda, tp.m1);
        m2_nodes.emplace_back(tp.lambda, tp.m2);
        if (s_nodes.size() > 8) {
            s_nodes.erase(s_nodes.begin());
            m1_nodes.erase(m1_nodes.begin());
            m2_nodes.erase(m2_nodes.begin());
        }
        band_last = band;
        dm_last = tp.m2 - tp.m1;
        lambda_last = tp.lambda;
    }
};

std::optional<WarmLocateResult> warm_step(int p, double lambda, const TraceState& st) {
    const double s_pred = extrapolate(st.s_nodes, lambda);
    double m1_pred = std::clamp(extrapolate(st.m1_nodes, lambda), 0.0, 1.0);
    double m2_pred = std::clamp(extrapolate(st.m2_nodes, lambda), 0.0, 1.0);
    if (m2_pred < m1_pred) std::swap(m1_pred, m2_pred);
    double dm_pred = m2_pred - m1_pred;

    double band_pred = st.band_last;
    if (st.dm_last > 0.0 && dm_pred > 0.0) {
        const double ratio = dm_pred / st.dm_last;
        band_pred = st.band_last * ratio * ratio * ratio;
    }
    const double dlam = std::abs(st.lambda_last - lambda);
    const double hw =
        std::min(0.2, std::max({3.0 * band_pred, 0.1 * dlam, 1e-10}));
    const double m_lo = std::max(0.0, m1_pred - 0.5 * dm_pred - 0.02);
    const double m_hi = std::min(1.0, m2_pred + 0.5 * dm_pred + 0.02);
    auto res = locate_first_order_warm(p, lambda, s_pred, hw, m_lo, m_hi, 401,
                                       std::max(dm_pred, 1e-6));
    if (!res) {
        // A widened retry guards against a mis-extrapolated window; a genuine
        // terminus stays empty no matter how wide the window is.
        if (dm_pred > 0.05)
            res = locate_first_order_warm(p, lambda, s_pred, std::min(0.3, 4.0 * hw),
                                          std::max(0.0, m_lo - 0.05),
                                          std::min(1.0, m_hi + 0.05), 801,
                                          std::max(dm_pred, 1e-6));
    }
    return res;
}

}  // namespace

TracedLine trace_first_order_line(int p, const std::vector<double>& lambda_grid) {
    require_odd_p(p);
    if (lambda_grid.empty())
        throw std::invalid_argument("trace_first_order_line: empty lambda grid");
    std::vector<double> grid = lambda_grid;
    std::sort(grid.begin(), grid.end(), std::greater<>());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    for (const double lam : grid)
        if (!(lam > 0.0 && lam <= 1.0))
            throw std::invalid_argument(
                "trace_first_order_line: every lambda must lie in (0, 1]");

    TracedLine out;
    TraceState st;
    bool ended = false;

    for (const double lam : grid) {
        if (ended) break;
        if (st.s_nodes.empty()) {
            const auto tp = locate_first_order(p, lam);
            if (!tp) continue;
            const double band =
                measure_band(p, lam, tp->s_c, 0.0, 1.0, 3001, 0.2);
            st.push(*tp, band);
            out.points.push_back(*tp);
            continue;
        }
        const auto res = warm_step(p, lam, st);
        if (res) {
            st.push(res->point, res->band_halfwidth);
            out.points.push_back(res->point);
            continue;
        }

        // The line ended between the last success and this lambda: bisect the
        // terminus to 1e-7 in lambda, feeding each success back into the
        // extrapolation state.
        double lam_hi = st.lambda_last;
        double lam_lo = lam;
        while (lam_hi - lam_lo > 1e-7) {
            const double mid = 0.5 * (lam_lo + lam_hi);
            const auto r = warm_step(p, mid, st);
            if (r) {
                st.push(r->point, r->band_halfwidth);
                out.points.push_back(r->point);
                lam_hi = mid;
            } else {
                lam_lo = mid;
            }
        }
        if (st.dm_last > 0.02)
            throw numerical_error(
                "trace_first_order_line: tracing lost the transition while the "
                "magnetization jump was still finite");
        ended = true;
    }

    std::sort(out.points.begin(), out.points.end(),
              [](const TransitionPoint& a, const TransitionPoint& b) {
                  return a.lambda > b.lambda;
              });
    if (!out.points.empty() && ended) {
        const auto& lastp = out.points.back();
        out.terminus_lambda = lastp.lambda;
        out.terminus_s = lastp.s_c;
        out.terminus_m = 0.5 * (lastp.m1 + lastp.m2);
    }
    return out;
}

}  // namespace pspin
