#include "spikelab/numerics/block_tridiag.hpp"
#include "spikelab/errors.hpp"

#include <cmath>
#include <algorithm>

namespace spikelab::numerics {

namespace {

// 2x2 helpers, blocks row-major [a b; c d]
inline void mat2_vec(const double* m, const double* x, double* y) {
    y[0] = m[0] * x[0] + m[1] * x[1];
    y[1] = m[2] * x[0] + m[3] * x[1];
}

inline void mat2_mul(const double* a, const double* b, double* c) {
    c[0] = a[0] * b[0] + a[1] * b[2];
    c[1] = a[0] * b[1] + a[1] * b[3];
    c[2] = a[2] * b[0] + a[3] * b[2];
    c[3] = a[2] * b[1] + a[3] * b[3];
}

// inverse with the pivot magnitude reported; returns false if singular
inline bool mat2_inv(const double* m, double* inv, double& pivot, double& det_out) {
    double det = m[0] * m[3] - m[1] * m[2];
    det_out = det;
    double scale = std::max({std::fabs(m[0]), std::fabs(m[1]), std::fabs(m[2]), std::fabs(m[3]), 1e-300});
    pivot = std::fabs(det) / scale;
    if (!(std::fabs(det) > 0.0) || !std::isfinite(det)) return false;
    double idet = 1.0 / det;
    inv[0] = m[3] * idet;
    inv[1] = -m[1] * idet;
    inv[2] = -m[2] * idet;
    inv[3] = m[0] * idet;
    return true;
}

} // namespace

void BlockTridiag::multiply(const double* x, double* y) const {
    for (std::size_t i = 0; i < n; ++i) {
        double acc[2];
        mat2_vec(D(i), x + 2 * i, acc);
        if (i > 0) {
            double t[2];
            mat2_vec(L(i), x + 2 * (i - 1), t);
            acc[0] += t[0];
            acc[1] += t[1];
        }
        if (i + 1 < n) {
            double t[2];
            mat2_vec(U(i), x + 2 * (i + 1), t);
            acc[0] += t[0];
            acc[1] += t[1];
        }
        y[2 * i] = acc[0];
        y[2 * i + 1] = acc[1];
    }
}

void BlockTridiagLU::factor(const BlockTridiag& a) {
    n_ = a.n;
    dinv_.assign(4 * n_, 0.0);
    lmul_.assign(4 * n_, 0.0);
    upper_ = a.upper;
    min_pivot_ = 1e300;
    det_sign_ = 1;

    double work[4]; // running Schur complement block
    std::copy(a.D(0), a.D(0) + 4, work);
    for (std::size_t i = 0;; ++i) {
        double piv, det;
        if (!mat2_inv(work, &dinv_[4 * i], piv, det))
            throw error("SingularBlock", "block-tridiagonal pivot is singular at node " + std::to_string(i));
        min_pivot_ = std::min(min_pivot_, piv);
        if (det < 0) det_sign_ = -det_sign_;
        if (i + 1 == n_) break;
        // lmul = L(i+1) * dinv(i); work = D(i+1) - lmul * U(i)
        mat2_mul(a.L(i + 1), &dinv_[4 * i], &lmul_[4 * (i + 1)]);
        double lu[4];
        mat2_mul(&lmul_[4 * (i + 1)], a.U(i), lu);
        const double* d = a.D(i + 1);
        work[0] = d[0] - lu[0];
        work[1] = d[1] - lu[1];
        work[2] = d[2] - lu[2];
        work[3] = d[3] - lu[3];
    }
}

void BlockTridiagLU::solve(double* b) const {
    // forward: b_i <- b_i - lmul_i b_{i-1}
    for (std::size_t i = 1; i < n_; ++i) {
        double t[2];
        mat2_vec(&lmul_[4 * i], b + 2 * (i - 1), t);
        b[2 * i] -= t[0];
        b[2 * i + 1] -= t[1];
    }
    // backward: x_i = dinv_i (b_i - U_i x_{i+1})
    double t[2], x[2];
    mat2_vec(&dinv_[4 * (n_ - 1)], b + 2 * (n_ - 1), x);
    b[2 * (n_ - 1)] = x[0];
    b[2 * (n_ - 1) + 1] = x[1];
    for (std::size_t ii = n_ - 1; ii-- > 0;) {
        mat2_vec(&upper_[4 * ii], b + 2 * (ii + 1), t);
        double rhs[2] = {b[2 * ii] - t[0], b[2 * ii + 1] - t[1]};
        mat2_vec(&dinv_[4 * ii], rhs, x);
        b[2 * ii] = x[0];
        b[2 * ii + 1] = x[1];
    }
}

bool solve_bordered(const BlockTridiagLU& lu, const std::vector<double>& b,
                    const std::vector<double>& c, double d,
                    std::vector<double>& r, double q,
                    std::vector<double>& x, double& s) {
    std::vector<double> w = r; // A w = r
    lu.solve(w);
    std::vector<double> z = b; // A z = b
    lu.solve(z);
    double cw = 0.0, cz = 0.0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        cw += c[i] * w[i];
        cz += c[i] * z[i];
    }
    double denom = d - cz;
    if (std::fabs(denom) < 1e-14 * (std::fabs(d) + std::fabs(cz) + 1e-30)) return false;
    s = (q - cw) / denom;
    // x = w - s z solves A x = r - b s
    x.resize(w.size());
    for (std::size_t i = 0; i < w.size(); ++i) x[i] = w[i] - s * z[i];
    return true;
}

} // namespace spikelab::numerics
