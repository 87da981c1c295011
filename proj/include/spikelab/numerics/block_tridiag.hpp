#pragma once

#include <vector>
#include <cstddef>

namespace spikelab::numerics {

/// Block-tridiagonal matrix with 2x2 blocks, the Jacobian shape shared by
/// every two-species 1-D discretization in this project (nodes carry the
/// field pair, diffusion couples neighbours, kinetics couple within a node).
///
/// Blocks are stored row-major: lower[i], diag[i], upper[i] refer to node i
/// (lower[0] and upper[n-1] unused).
struct BlockTridiag {
    std::size_t n = 0; // number of nodes (matrix is 2n x 2n)
    std::vector<double> lower, diag, upper; // 4 doubles per block

    explicit BlockTridiag(std::size_t nodes) : n(nodes), lower(4 * nodes, 0.0), diag(4 * nodes, 0.0), upper(4 * nodes, 0.0) {}

    double* L(std::size_t i) { return &lower[4 * i]; }
    double* D(std::size_t i) { return &diag[4 * i]; }
    double* U(std::size_t i) { return &upper[4 * i]; }
    const double* L(std::size_t i) const { return &lower[4 * i]; }
    const double* D(std::size_t i) const { return &diag[4 * i]; }
    const double* U(std::size_t i) const { return &upper[4 * i]; }

    /// y = A x (x, y of length 2n)
    void multiply(const double* x, double* y) const;
};

/// LU factorization of a BlockTridiag by block forward elimination (2x2
/// pivots inverted with partial pivoting inside the block). Throws
/// singular_slave_operator-agnostic std logic via spikelab::error when a
/// pivot block is numerically singular.
class BlockTridiagLU {
public:
    explicit BlockTridiagLU(const BlockTridiag& a) { factor(a); }
    BlockTridiagLU() = default;

    void factor(const BlockTridiag& a);
    /// Solves A x = b in place.
    void solve(double* b) const;
    void solve(std::vector<double>& b) const { solve(b.data()); }

    bool factored() const { return n_ > 0; }
    /// Smallest pivot magnitude met during elimination (singularity monitor).
    double min_pivot() const { return min_pivot_; }
    /// Sign of det(A) = product of the Schur pivot-block determinants.
    int det_sign() const { return det_sign_; }

private:
    std::size_t n_ = 0;
    std::vector<double> dinv_;  // inverted diagonal blocks after elimination
    std::vector<double> lmul_;  // L(i) * dinv(i-1)
    std::vector<double> upper_; // copy of upper blocks
    double min_pivot_ = 0.0;
    int det_sign_ = 1;
};

/// Solves the bordered system
///   [A  b] [x]   [r]
///   [c' d] [s] = [q]
/// with A block-tridiagonal, via two solves with A (Keller bordering).
/// Returns false when the Schur scalar d - c'A^{-1}b vanishes.
bool solve_bordered(const BlockTridiagLU& lu, const std::vector<double>& b,
                    const std::vector<double>& c, double d,
                    std::vector<double>& r, double q,
                    std::vector<double>& x, double& s);

} // namespace spikelab::numerics
