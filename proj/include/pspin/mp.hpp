#pragma once

#include <mutex>

#include <boost/multiprecision/mpfr.hpp>

namespace pspin {

// Arbitrary-precision real with runtime-selected precision, expression
// templates off so it behaves like a plain scalar in the templated solvers.
using mpreal =
    boost::multiprecision::number<boost::multiprecision::mpfr_float_backend<0>,
                                  boost::multiprecision::et_off>;

// Scoped override of the default working precision (decimal digits).
// The backend stores the default as a single process-global, so values freshly
// constructed in one thread pick up whatever another thread set last; guarded
// regions therefore exclude each other (recursive, so guards may nest within
// a thread). Multiprecision work serializes across threads; the double
// precision stages around it still run concurrently.
class precision_guard {
public:
    explicit precision_guard(unsigned digits10)
        : lock_(mutex()), saved_(mpreal::default_precision()) {
        mpreal::default_precision(digits10);
    }
    precision_guard(const precision_guard&) = delete;
    precision_guard& operator=(const precision_guard&) = delete;
    ~precision_guard() { mpreal::default_precision(saved_); }

private:
    static std::recursive_mutex& mutex() {
        static std::recursive_mutex m;
        return m;
    }

    std::unique_lock<std::recursive_mutex> lock_;
    unsigned saved_;
};

} // namespace pspin
