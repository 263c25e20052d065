#pragma once

#include <stdexcept>
#include <string>

namespace pspin {

// Numerical failure distinct from argument validation: quadrature that will
// not converge, eigensolver breakdown, derivative residuals out of bounds.
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Parameters of the interpolating Hamiltonian
//   H(s, lambda) = s [ lambda H0 + (1 - lambda) V_TI ] + (1 - s) V_TF
// with H0 = -N m_z^p, V_TI = +N m_x^2, V_TF = -sum_i sigma_x^i.
// Per spin: E = H / N = -s lambda m_z^p + s(1-lambda) m_x^2 - (1-s) m_x.
struct ModelParams {
    int p = 3;          // ferromagnetic exponent
    double s = 0.0;     // annealing parameter in [0, 1]
    double lambda = 1.0; // stoquasticity parameter in [0, 1]
};

// Throws std::invalid_argument unless p >= 2, s in [0,1], lambda in [0,1].
// Odd p is not required here: transition and critical-point operations add
// their own odd-p precondition.
void validate(const ModelParams& params);

// Throws std::invalid_argument unless p is odd and p >= 3.
void require_odd_p(int p);

// Integer power with deterministic rounding (plain repeated multiplication).
double ipow(double x, int n);

} // namespace pspin
