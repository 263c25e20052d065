#include "pspin/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "pspin/mp.hpp"
#include "pspin/sturm.hpp"

namespace pspin {

namespace {

struct PairEval {
    double e0 = 0.0;
    double e1 = 0.0;  // per-spin eigenvalues
};

Pentadiagonal<double> bands_at(int p, double lambda, int n_spins, double s) {
    Pentadiagonal<double> a;
    build_sector_bands<double>(p, s, lambda, n_spins, a.diag, a.off1, a.off2);
    return a;
}

// Two lowest per-spin eigenvalues in double precision. A warm bracket from a
// nearby s is padded by the operator-norm bound |dE/ds| <= 2 (per spin) and
// verified by Sturm counts before use.
PairEval eval_pair(int p, double lambda, int n_spins, double s,
                   const PairEval* warm, double warm_ds) {
    Pentadiagonal<double> a = bands_at(p, lambda, n_spins, s);
    const double pivmin = default_pivmin(a);
    auto [glo, ghi] = gershgorin_bounds(a);
    const double scale = std::max({1.0, std::abs(glo), std::abs(ghi)});
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;

    double lo = glo, hi = ghi;
    if (warm) {
        const double pad = 3.0 * std::abs(warm_ds) + 1e3 * tol;
        const double wlo = warm->e0 - pad, whi = warm->e1 + pad;
        if (count_below(a, wlo, pivmin) == 0 && count_below(a, whi, pivmin) >= 2) {
            lo = wlo;
            hi = whi;
        }
    }
    auto [e0, e1] = two_lowest_eigenvalues(a, lo, hi, tol, pivmin);
    return {e0, e1};
}

struct MpPair {
    mpreal e0, e1;
};

// Two lowest per-spin eigenvalues at the current working precision. tol_floor
// (absolute, per spin) relaxes the bisection target when the caller only needs
// the eigenvalues to a known accuracy well above working epsilon.
MpPair mp_eval_pair(int p, const mpreal& lambda, int n_spins, const mpreal& s,
                    const MpPair* warm, const mpreal& warm_ds,
                    const mpreal& tol_floor) {
    Pentadiagonal<mpreal> a;
    build_sector_bands<mpreal>(p, s, lambda, n_spins, a.diag, a.off1, a.off2);
    const mpreal pivmin = default_pivmin(a);
    auto [glo, ghi] = gershgorin_bounds(a);
    using std::abs;
    mpreal scale = abs(glo) > abs(ghi) ? abs(glo) : abs(ghi);
    if (scale < 1) scale = 1;
    mpreal tol = 64 * machine_epsilon<mpreal>() * scale;
    if (tol_floor > tol) tol = tol_floor;

    mpreal lo = glo, hi = ghi;
    if (warm) {
        const mpreal pad = 3 * abs(warm_ds) + 1000 * tol;
        const mpreal wlo = warm->e0 - pad, whi = warm->e1 + pad;
        if (count_below(a, wlo, pivmin) == 0 && count_below(a, whi, pivmin) >= 2) {
            lo = wlo;
            hi = whi;
        }
    }
    auto [e0, e1] = two_lowest_eigenvalues(a, lo, hi, tol, pivmin);
    return {e0, e1};
}

// Quadratic-vertex refinement of the squared extensive gap around the golden-
// section minimum. Near an avoided crossing gap^2(s) is an almost exact
// parabola, so three-point fits recentre onto the vertex immediately. Two
// independent failure modes are handled separately: when the fitted curvature
// is lost in eigensolver noise the working precision doubles, and when the
// vertex depth is not resolved above that noise (which also covers
// contamination by cubic/quartic terms, a far larger effect for deep minima)
// the stencil spacing h shrinks instead -- contamination falls as h^4 while
// the noise floor falls only as h, so the depth always surfaces. The fit is
// accepted once it reproduces itself across an h shrink, which rules out
// residual contamination. This keeps full relative accuracy of gap_min even
// when it is exponentially far below double precision.
MinGapResult polish_vertex(int p, double lambda, int n_spins, double s_golden,
                           double s_lo, double s_hi, double s_tol) {
    unsigned digits = 40;
    const unsigned digits_cap = 2080;
    const double h_cap = (s_hi - s_lo) / 4;

    precision_guard guard(digits);
    mpreal s_v(s_golden);
    mpreal h = std::min(std::max(30.0 * s_tol, 1e-7), h_cap);
    const mpreal lam(lambda);
    mpreal d2_prev(-1);
    bool d2_confirmed = false;
    mpreal tol_floor(0);  // per-spin eigenvalue tolerance, set once gap known

    std::optional<MpPair> warm;
    mpreal warm_s(0);

    auto gap2_at = [&](const mpreal& s) {
        MpPair pr = mp_eval_pair(p, lam, n_spins, s, warm ? &*warm : nullptr,
                                 warm ? mpreal(s - warm_s) : mpreal(0), tol_floor);
        warm = pr;
        warm_s = s;
        mpreal g = n_spins * (pr.e1 - pr.e0);
        return g * g;
    };

    for (int round = 0; round < 120; ++round) {
        precision_guard round_guard(digits);
        for (mpreal* q : {&s_v, &h, &d2_prev, &warm_s, &tol_floor})
            q->precision(static_cast<int>(digits));
        if (warm) {
            warm->e0.precision(static_cast<int>(digits));
            warm->e1.precision(static_cast<int>(digits));
        }

        const mpreal g2m = gap2_at(s_v - h);
        const mpreal g20 = gap2_at(s_v);
        const mpreal g2p = gap2_at(s_v + h);

        using std::sqrt;
        const mpreal eps = machine_epsilon<mpreal>();
        const mpreal e_err =
            2 * n_spins * (64 * eps * 3 + tol_floor);  // extensive eigenvalue noise
        mpreal g2max = g2m;
        if (g20 > g2max) g2max = g20;
        if (g2p > g2max) g2max = g2p;
        const mpreal g2_err = 2 * sqrt(g2max) * e_err + e_err * e_err;

        const mpreal a2 = (g2p + g2m - 2 * g20) / (2 * h * h);
        const mpreal b = (g2p - g2m) / (2 * h);

        if (a2 <= 4 * g2_err / (h * h)) {  // curvature lost in noise
            tol_floor = 0;
            if ((digits *= 2) > digits_cap)
                throw numerical_error("min_gap: precision runaway in vertex polish");
            continue;
        }
        using std::abs;
        // Once the curvature test has passed, the noise on the fitted vertex
        // position is below h/8, so the full Newton step is safe; cap it only
        // to stay inside the search bracket.
        mpreal delta = -b / (2 * a2);
        if (delta > h_cap) delta = mpreal(h_cap);
        if (delta < -h_cap) delta = -mpreal(h_cap);
        s_v += delta;

        const mpreal d2 = g20 - b * b / (4 * a2);
        if (d2 <= 100 * g2_err) {
            // Depth buried under contamination or noise; both fall faster
            // than the signal as h shrinks. The recentering just done leaves a
            // residual offset set by the eigenvalue tolerance, so the shrink
            // and the tolerance are chosen together to keep that residual
            // well inside the next stencil.
            h *= mpreal(1e-4);
            tol_floor = sqrt(a2) * h * mpreal(2.5e-6) / n_spins;
            continue;
        }

        if (abs(delta) <= h / 8 && d2_prev > 0 &&
            abs(d2 - d2_prev) <= mpreal(1e-6) * d2) {
            MinGapResult r;
            r.s_min = static_cast<double>(s_v);
            r.gap_min = static_cast<double>(sqrt(d2));
            if (!(r.gap_min >= 0))
                throw numerical_error("min_gap: negative squared gap after polish");
            return r;
        }
        if (d2_prev > 0 && abs(d2 - d2_prev) <= mpreal(1e-3) * d2)
            d2_confirmed = true;  // depth reproduced across an h change
        d2_prev = d2;
        const mpreal gap_est = sqrt(d2);
        // Resolving the vertex depth against the much larger stencil-edge gaps
        // costs roughly half again the gap's own decimal exponent in digits.
        long needed =
            std::lround(-1.5 * static_cast<double>(log10(gap_est))) + 40;
        if (needed < 40) needed = 40;
        if (digits > 2 * static_cast<unsigned>(needed))
            digits = static_cast<unsigned>(needed);

        mpreal h_next = h * mpreal(1e-3);
        if (h_next < abs(delta)) h_next = abs(delta);
        // Keep the stencil in the sweet spot where the edge gaps stay within
        // a decade of the depth -- but only once the depth estimate has been
        // confirmed, since before that gap_est may still be contamination.
        if (d2_confirmed) {
            const mpreal h_floor = 10 * gap_est / sqrt(a2);
            if (h_next < h_floor) h_next = h_floor;
        }
        if (h_next > h) h_next = h;  // spacing only ever shrinks

        // Eigenvalue tolerance for the next round. Cubic/quartic contamination
        // of d2 falls as the fourth power of the shrink, so budget the noise
        // against that smaller depth, with the stencil-edge gap as the
        // cancellation scale and margin enough that the exit comparison at
        // 1e-6 relative sits far above the noise.
        mpreal shrink = h_next / h;
        shrink *= shrink;
        shrink *= shrink;
        tol_floor = d2 * shrink /
                    (mpreal(4e7) * sqrt(a2) * h_next * n_spins);
        h = h_next;
    }
    throw numerical_error("min_gap: vertex polish failed to converge");
}

} // namespace

std::vector<double> lowest_eigenvalues(const SectorHamiltonian& h, int k) {
    const int dim = h.n_spins + 1;
    if (k < 1 || k > dim)
        throw std::invalid_argument("lowest_eigenvalues: k must lie in [1, N+1], got " +
                                    std::to_string(k));
    Pentadiagonal<double> a{h.diag, h.off1, h.off2};
    const double scale = std::max(1.0, infinity_norm(a));
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * scale;
    return lowest_eigenvalues_sturm(a, k, tol);
}

GapCurve gap_curve(int p, double lambda, int n_spins,
                   const std::vector<double>& s_grid) {
    ModelParams base{p, 0.0, lambda};
    validate(base);
    if (n_spins < 2)
        throw std::invalid_argument("gap_curve: n_spins must be >= 2");
    if (s_grid.empty())
        throw std::invalid_argument("gap_curve: empty s_grid");
    for (size_t i = 0; i < s_grid.size(); ++i) {
        if (s_grid[i] < 0.0 || s_grid[i] > 1.0)
            throw std::invalid_argument("gap_curve: s_grid entries must lie in [0, 1]");
        if (i > 0 && !(s_grid[i] > s_grid[i - 1]))
            throw std::invalid_argument("gap_curve: s_grid must be strictly increasing");
    }

    GapCurve curve;
    curve.lambda = lambda;
    curve.n_spins = n_spins;
    curve.samples.reserve(s_grid.size());

    PairEval prev{};
    bool have_prev = false;
    double prev_s = 0.0;
    for (double s : s_grid) {
        try {
            PairEval pr = eval_pair(p, lambda, n_spins, s,
                                    have_prev ? &prev : nullptr, s - prev_s);
            prev = pr;
            have_prev = true;
            prev_s = s;
            curve.samples.emplace_back(s, std::max(0.0, n_spins * (pr.e1 - pr.e0)));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "gap_curve: eigensolver failure at s = " << s << ": " << e.what();
            throw numerical_error(msg.str());
        }
    }
    return curve;
}

MinGapResult min_gap(int p, double lambda, int n_spins,
                     std::pair<double, double> s_bracket, int coarse_points,
                     double s_tol) {
    ModelParams base{p, 0.0, lambda};
    validate(base);
    if (n_spins < 2)
        throw std::invalid_argument("min_gap: n_spins must be >= 2");
    const double a = s_bracket.first, b = s_bracket.second;
    if (!(a >= 0.0 && b <= 1.0 && a < b))
        throw std::invalid_argument("min_gap: bracket must satisfy 0 <= a < b <= 1");
    if (coarse_points < 3)
        throw std::invalid_argument("min_gap: need at least 3 coarse points");
    if (!(s_tol > 0))
        throw std::invalid_argument("min_gap: s_tol must be positive");

    // Coarse scan.
    std::vector<double> gaps(static_cast<size_t>(coarse_points));
    PairEval prev{};
    bool have_prev = false;
    double prev_s = 0.0;
    int best = 0;
    for (int i = 0; i < coarse_points; ++i) {
        const double s = a + (b - a) * i / (coarse_points - 1);
        PairEval pr = eval_pair(p, lambda, n_spins, s, have_prev ? &prev : nullptr,
                                s - prev_s);
        prev = pr;
        have_prev = true;
        prev_s = s;
        gaps[static_cast<size_t>(i)] = n_spins * (pr.e1 - pr.e0);
        if (gaps[static_cast<size_t>(i)] < gaps[static_cast<size_t>(best)]) best = i;
    }
    if (best == 0 || best == coarse_points - 1) {
        std::ostringstream msg;
        msg << "min_gap: no interior minimum in bracket [" << a << ", " << b << "]";
        throw std::domain_error(msg.str());
    }

    // Golden-section refinement inside the bracketing coarse interval.
    const double step = (b - a) / (coarse_points - 1);
    double lo = a + step * (best - 1);
    double hi = a + step * (best + 1);
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;

    auto gap_at = [&](double s) {
        PairEval pr = eval_pair(p, lambda, n_spins, s, have_prev ? &prev : nullptr,
                                s - prev_s);
        prev = pr;
        prev_s = s;
        return n_spins * (pr.e1 - pr.e0);
    };

    double c = hi - gr * (hi - lo);
    double d = lo + gr * (hi - lo);
    double fc = gap_at(c);
    double fd = gap_at(d);
    while (hi - lo > s_tol) {
        if (fc < fd) {
            hi = d;
            d = c;
            fd = fc;
            c = hi - gr * (hi - lo);
            fc = gap_at(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + gr * (hi - lo);
            fd = gap_at(d);
        }
    }
    const double s_golden = (lo + hi) / 2;

    return polish_vertex(p, lambda, n_spins, s_golden, a, b, s_tol);
}

GapScalingFit fit_gap_scaling(const std::vector<std::pair<int, double>>& points) {
    if (points.size() < 3)
        throw std::invalid_argument("fit_gap_scaling: need at least 3 points");
    for (size_t i = 0; i < points.size(); ++i) {
        if (!(points[i].second > 0.0))
            throw std::invalid_argument("fit_gap_scaling: gaps must be positive");
        if (i > 0 && points[i].first <= points[i - 1].first)
            throw std::invalid_argument("fit_gap_scaling: n_spins must be strictly increasing");
    }

    const double n = static_cast<double>(points.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [ni, gi] : points) {
        const double x = ni, y = std::log(gi);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double denom = n * sxx - sx * sx;
    GapScalingFit fit;
    fit.points = points;
    fit.slope = (n * sxy - sx * sy) / denom;
    fit.intercept = (sy - fit.slope * sx) / n;

    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (const auto& [ni, gi] : points) {
        const double y = std::log(gi);
        const double yhat = fit.intercept + fit.slope * ni;
        ss_res += (y - yhat) * (y - yhat);
        ss_tot += (y - ybar) * (y - ybar);
    }
    fit.r_squared = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
    fit.r_squared = std::clamp(fit.r_squared, 0.0, 1.0);
    return fit;
}

} // namespace pspin
