#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "pspin/model.hpp"

namespace pspin {

// Symmetric pentadiagonal matrix: diag has n entries, off1 couples i,i+1,
// off2 couples i,i+2.
template <class Real>
struct Pentadiagonal {
    std::vector<Real> diag;
    std::vector<Real> off1;
    std::vector<Real> off2;

    int size() const { return static_cast<int>(diag.size()); }
};

// Smallest eps with 1 + eps != 1 at the precision Real currently carries.
// Computed by halving so it is correct for runtime-precision float types too.
template <class Real>
Real machine_epsilon() {
    Real one(1), eps(1);
    while (one + eps / 2 != one)
        eps /= 2;
    return eps;
}

template <class Real>
Real infinity_norm(const Pentadiagonal<Real>& a) {
    using std::abs;
    const int n = a.size();
    Real best(0);
    for (int i = 0; i < n; ++i) {
        Real row = abs(a.diag[i]);
        if (i >= 1) row += abs(a.off1[i - 1]);
        if (i + 1 < n) row += abs(a.off1[i]);
        if (i >= 2) row += abs(a.off2[i - 2]);
        if (i + 2 < n) row += abs(a.off2[i]);
        if (row > best) best = row;
    }
    return best;
}

template <class Real>
Real default_pivmin(const Pentadiagonal<Real>& a) {
    const Real eps = machine_epsilon<Real>();
    Real nrm = infinity_norm(a);
    if (nrm < Real(1)) nrm = Real(1);
    return eps * eps * nrm;
}

// Number of eigenvalues of A strictly below x, by the inertia of the LDL^T
// factorization of A - xI. Zero pivots are nudged to -pivmin (counted
// negative), the usual bisection safeguard.
template <class Real>
int count_below(const Pentadiagonal<Real>& a, const Real& x, const Real& pivmin) {
    using std::abs;
    const int n = a.size();
    int count = 0;

    Real d_im1(0), d_im2(0);  // pivots at i-1, i-2
    Real u_im1(0);            // first-subdiagonal multiplier at i-1

    for (int i = 0; i < n; ++i) {
        Real w(0), u(0);
        Real d = a.diag[i] - x;
        if (i >= 2) {
            w = a.off2[i - 2] / d_im2;
            u = (a.off1[i - 1] - w * u_im1 * d_im2) / d_im1;
            d -= u * u * d_im1 + w * w * d_im2;
        } else if (i == 1) {
            u = a.off1[0] / d_im1;
            d -= u * u * d_im1;
        }
        if (abs(d) < pivmin) d = -pivmin;
        if (d < Real(0)) ++count;
        d_im2 = d_im1;
        d_im1 = d;
        u_im1 = u;
    }
    return count;
}

template <class Real>
std::pair<Real, Real> gershgorin_bounds(const Pentadiagonal<Real>& a) {
    using std::abs;
    const int n = a.size();
    Real lo = a.diag[0], hi = a.diag[0];
    for (int i = 0; i < n; ++i) {
        Real r(0);
        if (i >= 1) r += abs(a.off1[i - 1]);
        if (i + 1 < n) r += abs(a.off1[i]);
        if (i >= 2) r += abs(a.off2[i - 2]);
        if (i + 2 < n) r += abs(a.off2[i]);
        if (a.diag[i] - r < lo) lo = a.diag[i] - r;
        if (a.diag[i] + r > hi) hi = a.diag[i] + r;
    }
    return {lo, hi};
}

// Refine eigenvalue #index (0-based, ascending) inside [lo, hi] by bisection
// on the Sturm count. The bracket must satisfy count(lo) <= index < count(hi).
template <class Real>
Real bisect_eigenvalue(const Pentadiagonal<Real>& a, int index, Real lo, Real hi,
                       const Real& tol, const Real& pivmin) {
    for (int it = 0; it < 100000 && hi - lo > tol; ++it) {
        Real mid = (lo + hi) / 2;
        if (mid <= lo || mid >= hi) break;  // bracket exhausted at this precision
        if (count_below(a, mid, pivmin) >= index + 1)
            hi = mid;
        else
            lo = mid;
    }
    return (lo + hi) / 2;
}

// k smallest eigenvalues, ascending, each resolved to absolute tolerance tol.
template <class Real>
std::vector<Real> lowest_eigenvalues_sturm(const Pentadiagonal<Real>& a, int k,
                                           const Real& tol) {
    const int n = a.size();
    if (k < 1 || k > n)
        throw std::invalid_argument("lowest_eigenvalues: k out of range");
    const Real pivmin = default_pivmin(a);
    auto [glo, ghi] = gershgorin_bounds(a);

    std::vector<Real> out;
    out.reserve(k);
    Real lo = glo;
    for (int j = 0; j < k; ++j) {
        Real e = bisect_eigenvalue(a, j, lo, ghi, tol, pivmin);
        out.push_back(e);
        lo = e - tol;  // eigenvalue j+1 lies at or above eigenvalue j
    }
    return out;
}

// Two lowest eigenvalues with a shared bisection prefix: bisect the joint
// bracket until a point separates count 0|1 from 1|2, then refine each half.
template <class Real>
std::pair<Real, Real> two_lowest_eigenvalues(const Pentadiagonal<Real>& a,
                                             Real lo, Real hi, const Real& tol,
                                             const Real& pivmin) {
    Real sep(0);
    bool split = false;
    for (int it = 0; it < 100000 && hi - lo > tol; ++it) {
        Real mid = (lo + hi) / 2;
        if (mid <= lo || mid >= hi) break;
        int c = count_below(a, mid, pivmin);
        if (c == 0) {
            lo = mid;
        } else if (c >= 2) {
            hi = mid;
        } else {
            sep = mid;
            split = true;
            break;
        }
    }
    if (!split) {
        Real e = (lo + hi) / 2;  // degenerate to below tol
        return {e, e};
    }
    Real e0 = bisect_eigenvalue(a, 0, lo, sep, tol, pivmin);
    Real e1 = bisect_eigenvalue(a, 1, sep, hi, tol, pivmin);
    return {e0, e1};
}

} // namespace pspin
