#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace spikelab::numerics {

/// Brent root of f on [a, b]; f(a) and f(b) must bracket (one may be zero).
/// Throws bracket_failure when they do not.
double brent(const std::function<double(double)>& f, double a, double b,
             double xtol = 1e-13, int max_iter = 200);

/// Expands/validates a bracket then calls brent. Scans [lo, hi] with
/// `scan` subdivisions for the first sign change.
double brent_scan(const std::function<double(double)>& f, double lo, double hi,
                  int scan = 64, double xtol = 1e-13);

struct Newton2Result {
    double x = 0, y = 0;
    double residual = 0; // max-norm of F at the solution
    int iterations = 0;
    bool converged = false;
};

/// Damped Newton for a 2-equation system F(x,y) = 0 with a numerically
/// differenced Jacobian and simple backtracking on ||F||.
Newton2Result newton2(const std::function<std::pair<double, double>(double, double)>& F,
                      double x0, double y0, double tol = 1e-12, int max_iter = 60,
                      double fd_scale = 1e-7,
                      const std::function<bool(double, double)>& admissible = nullptr);

} // namespace spikelab::numerics
