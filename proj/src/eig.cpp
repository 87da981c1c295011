#include "spikelab/numerics/eig.hpp"
#include "spikelab/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace spikelab::numerics {

DenseEig dense_eigensolve(const std::vector<double>& a, int n, bool want_vectors) {
    Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> M(
        a.data(), n, n);
    Eigen::EigenSolver<Eigen::MatrixXd> es(M, want_vectors);
    if (es.info() != Eigen::Success) throw eig_solver_failure("dense QR iteration failed");
    DenseEig out;
    std::vector<int> order(n);
    for (int i = 0; i < n; ++i) order[i] = i;
    auto ev = es.eigenvalues();
    std::sort(order.begin(), order.end(), [&](int i, int j) { return ev[i].real() > ev[j].real(); });
    out.values.reserve(n);
    for (int k = 0; k < n; ++k) out.values.push_back(ev[order[k]]);
    if (want_vectors) {
        auto V = es.eigenvectors();
        out.vecs.resize(n);
        for (int k = 0; k < n; ++k) {
            out.vecs[k].resize(n);
            for (int i = 0; i < n; ++i) out.vecs[k][i] = V(i, order[k]);
        }
    }
    return out;
}

std::vector<RitzValue> shift_invert_arnoldi(
    const std::function<void(const std::vector<double>&, std::vector<double>&)>& apply, int n,
    double sigma, int krylov_dim, double ritz_tol) {
    int m = std::min(krylov_dim, n);
    std::vector<std::vector<double>> V;
    V.reserve(m + 1);
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);

    // deterministic start: alternating-sign ramp, normalized
    std::vector<double> v0(n);
    for (int i = 0; i < n; ++i) v0[i] = 1.0 + 0.3 * std::sin(0.7 * i);
    double nrm = 0;
    for (double x : v0) nrm += x * x;
    nrm = std::sqrt(nrm);
    for (double& x : v0) x /= nrm;
    V.push_back(v0);

    int built = 0;
    std::vector<double> w(n);
    for (int j = 0; j < m; ++j) {
        apply(V[j], w);
        // modified Gram-Schmidt with one reorthogonalization pass
        for (int pass = 0; pass < 2; ++pass) {
            for (int i = 0; i <= j; ++i) {
                double hij = 0;
                for (int k = 0; k < n; ++k) hij += V[i][k] * w[k];
                if (pass == 0)
                    H(i, j) = hij;
                else
                    H(i, j) += hij;
                for (int k = 0; k < n; ++k) w[k] -= hij * V[i][k];
            }
        }
        double beta = 0;
        for (double x : w) beta += x * x;
        beta = std::sqrt(beta);
        H(j + 1, j) = beta;
        built = j + 1;
        if (beta < 1e-14) break; // invariant subspace found
        std::vector<double> vn(n);
        for (int k = 0; k < n; ++k) vn[k] = w[k] / beta;
        V.push_back(vn);
    }

    Eigen::MatrixXd Hm = H.topLeftCorner(built, built);
    Eigen::EigenSolver<Eigen::MatrixXd> es(Hm, true);
    if (es.info() != Eigen::Success) throw eig_solver_failure("Hessenberg QR failed");
    double h_last = (built < m) ? 0.0 : H(built, built - 1);

    std::vector<RitzValue> out;
    for (int k = 0; k < built; ++k) {
        std::complex<double> theta = es.eigenvalues()[k];
        if (std::abs(theta) < 1e-13) continue; // infinite eigenvalue of the pencil
        RitzValue rv;
        rv.lambda = sigma + 1.0 / theta;
        double ylast = std::abs(es.eigenvectors()(built - 1, k));
        // residual of the shifted problem, mapped back: |h_{m+1,m} y_m| / |theta|^2
        rv.residual_estimate = h_last * ylast / std::norm(theta);
        if (rv.residual_estimate > ritz_tol) continue;
        rv.vector.assign(n, {0, 0});
        for (int i = 0; i < built; ++i) {
            std::complex<double> yi = es.eigenvectors()(i, k);
            for (int q = 0; q < n; ++q) rv.vector[q] += yi * V[i][q];
        }
        out.push_back(std::move(rv));
    }
    std::sort(out.begin(), out.end(),
              [](const RitzValue& a, const RitzValue& b) { return a.lambda.real() > b.lambda.real(); });
    // merge conjugate-pair duplicates and near-coincident Ritz values
    std::vector<RitzValue> dedup;
    for (auto& rv : out) {
        bool dup = false;
        for (const auto& kept : dedup)
            if (std::abs(kept.lambda - rv.lambda) < 1e-9 * (1.0 + std::abs(rv.lambda))) dup = true;
        if (!dup) dedup.push_back(std::move(rv));
    }
    return dedup;
}

} // namespace spikelab::numerics
