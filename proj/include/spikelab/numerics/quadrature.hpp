#pragma once

#include <functional>

namespace spikelab::numerics {

struct QuadResult {
    double value = 0.0;
    double error = 0.0; // accumulated error estimate
    int evaluations = 0;
};

/// Adaptive Gauss-Kronrod (G7,K15) quadrature of f over [a, b] to the given
/// absolute tolerance. Bisects the worst interval until the summed error
/// estimate is below tol. Throws quadrature_failure if the tolerance cannot
/// be met within max_intervals.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-10, int max_intervals = 20000);

} // namespace spikelab::numerics
