#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace spikelab::numerics {

struct DenseEig {
    std::vector<std::complex<double>> values;            // sorted by descending real part
    std::vector<std::vector<std::complex<double>>> vecs; // vecs[k] matches values[k]
};

/// Full eigendecomposition of a dense row-major n x n matrix (Eigen QR).
DenseEig dense_eigensolve(const std::vector<double>& a, int n, bool want_vectors = true);

struct RitzValue {
    std::complex<double> lambda;
    double residual_estimate = 0; // Arnoldi last-component bound in shifted space
    std::vector<std::complex<double>> vector;
};

/// Shift-invert Arnoldi for the pencil A x = lambda M x: the caller supplies
/// y = (A - sigma M)^{-1} (M x) as `apply`. Returns Ritz pairs transformed
/// back to lambda-space, sorted by descending Re(lambda), with the Arnoldi
/// residual bound mapped through the spectral transform. Deterministic
/// start vector.
std::vector<RitzValue> shift_invert_arnoldi(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply, int n,
    double sigma, int krylov_dim, double ritz_tol = 1e-8);

} // namespace spikelab::numerics
