#pragma once

#include <cstddef>
#include <functional>

namespace singreg {

struct QuadratureOptions {
    double abs_tol = 1e-14;
    double rel_tol = 1e-12;
    std::size_t panels_per_decade = 8;
    std::size_t max_intervals = 20000;
};

struct QuadratureResult {
    double value = 0.0;
    double error = 0.0;
    std::size_t intervals = 0;
};

// Adaptive Gauss-Kronrod (7/15) with bisection of the worst interval,
// starting from log-spaced panels on [a, b], 0 < a < b. Throws NumericError
// naming the worst subinterval when the tolerance is not reached.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

} // namespace singreg
