#include "pspin/model.hpp"

namespace pspin {

void validate(const ModelParams& params) {
    if (params.p < 2)
        throw std::invalid_argument("p must be an integer >= 2, got " +
                                    std::to_string(params.p));
    if (!(params.s >= 0.0 && params.s <= 1.0))
        throw std::invalid_argument("s must lie in [0, 1], got " +
                                    std::to_string(params.s));
    if (!(params.lambda >= 0.0 && params.lambda <= 1.0))
        throw std::invalid_argument("lambda must lie in [0, 1], got " +
                                    std::to_string(params.lambda));
}

void require_odd_p(int p) {
    if (p < 3 || p % 2 == 0)
        throw std::invalid_argument("p must be odd and >= 3, got " +
                                    std::to_string(p));
}

double ipow(double x, int n) {
    double r = 1.0;
    for (int i = 0; i < n; ++i) r *= x;
    return r;
}

} // namespace pspin
