#include "spikelab/spectrum.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/numerics/block_tridiag.hpp"
#include "spikelab/numerics/eig.hpp"
#include "spikelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace spikelab::spectrum {

using models::ModelKind;
using numerics::BlockTridiag;
using numerics::BlockTridiagLU;

namespace {

// scalar tridiagonal LU (Thomas); the slave operator is weakly diagonally
// dominant thanks to the -V0^2 potential
struct Tridiag {
    std::vector<double> lo, di, up; // lo[0], up[n-1] unused

    explicit Tridiag(int n) : lo(n, 0), di(n, 0), up(n, 0) {}
    int n() const { return static_cast<int>(di.size()); }
};

struct TridiagLU {
    std::vector<double> di, up, lmul;
    double min_pivot = 0;

    explicit TridiagLU(const Tridiag& t) {
        int n = t.n();
        di = t.di;
        up = t.up;
        lmul.assign(n, 0.0);
        min_pivot = 1e300;
        double scale = 0;
        for (int i = 0; i < n; ++i)
            scale = std::max({scale, std::fabs(t.di[i]), std::fabs(t.up[i]), std::fabs(t.lo[i])});
        for (int i = 1; i < n; ++i) {
            min_pivot = std::min(min_pivot, std::fabs(di[i - 1]) / scale);
            if (!(std::fabs(di[i - 1]) > 0))
                throw singular_slave_operator("slave operator pivot vanished");
            lmul[i] = t.lo[i] / di[i - 1];
            di[i] -= lmul[i] * t.up[i - 1];
        }
        min_pivot = std::min(min_pivot, std::fabs(di[n - 1]) / scale);
        if (min_pivot < 1e-13)
            throw singular_slave_operator("slave operator numerically singular (increase y_max)");
    }

    void solve(std::vector<double>& b) const {
        int n = static_cast<int>(di.size());
        for (int i = 1; i < n; ++i) b[i] -= lmul[i] * b[i - 1];
        b[n - 1] /= di[n - 1];
        for (int i = n - 2; i >= 0; --i) b[i] = (b[i] - up[i] * b[i + 1]) / di[i];
    }
};

struct Operators {
    int n;
    double h, fc;
    std::vector<double> cPhi; // 2 fc U0 V0
    std::vector<double> cN;   // Phi coefficient in the slave equation
    std::vector<double> V2;   // V0^2
    Tridiag AN;               // slave operator D2(Neumann) - V0^2

    explicit Operators(const CoreSolution& s)
        : n(s.n()), h(s.h()), fc(s.kind == ModelKind::Brusselator ? s.f : 1.0), AN(s.n()) {
        cPhi.resize(n);
        cN.resize(n);
        V2.resize(n);
        bool bru = s.kind == ModelKind::Brusselator;
        for (int i = 0; i < n; ++i) {
            double uv = s.U0[i] * s.V0[i];
            cPhi[i] = 2.0 * fc * uv;
            cN[i] = bru ? 2.0 * uv - 1.0 : 2.0 * uv;
            V2[i] = s.V0[i] * s.V0[i];
        }
        double ih2 = 1.0 / (h * h);
        AN.di[0] = -2.0 * ih2 - V2[0];
        AN.up[0] = 2.0 * ih2;
        for (int i = 1; i + 1 < n; ++i) {
            AN.lo[i] = ih2;
            AN.di[i] = -2.0 * ih2 - V2[i];
            AN.up[i] = ih2;
        }
        AN.lo[n - 1] = 2.0 * ih2;
        AN.di[n - 1] = -2.0 * ih2 - V2[n - 1];
    }

    // slave solve: N = AN^{-1}(cN .* phi_ext), phi_ext has Phi(n-1)=0
    std::vector<double> slave(const TridiagLU& lu, const std::vector<double>& phi) const {
        std::vector<double> rhs(n, 0.0);
        for (int i = 0; i < n; ++i) rhs[i] = cN[i] * (i < static_cast<int>(phi.size()) ? phi[i] : 0.0);
        lu.solve(rhs);
        return rhs;
    }
};

// coupled residual max-norm for (phi, N) with ||phi||_inf normalized by caller
double coupled_residual(const Operators& op, const std::vector<double>& phi,
                        const std::vector<double>& N, double lambda) {
    double ih2 = 1.0 / (op.h * op.h);
    int n = op.n;
    auto phi_at = [&](int i) { return i < static_cast<int>(phi.size()) ? phi[i] : 0.0; };
    double r = 0;
    for (int i = 0; i < n; ++i) {
        double lapP = (i == 0)       ? 2.0 * (phi_at(1) - phi_at(0)) * ih2
                      : (i == n - 1) ? 0.0
                                     : (phi_at(i - 1) - 2.0 * phi_at(i) + phi_at(i + 1)) * ih2;
        double lapN = (i == 0)       ? 2.0 * (N[1] - N[0]) * ih2
                      : (i == n - 1) ? 2.0 * (N[n - 2] - N[n - 1]) * ih2
                                     : (N[i - 1] - 2.0 * N[i] + N[i + 1]) * ih2;
        if (i < n - 1) {
            double rphi = lapP - phi_at(i) + op.cPhi[i] * phi_at(i) + op.fc * op.V2[i] * N[i] -
                          lambda * phi_at(i);
            r = std::max(r, std::fabs(rphi));
        }
        double rn = lapN - op.V2[i] * N[i] - op.cN[i] * phi_at(i);
        r = std::max(r, std::fabs(rn));
    }
    return r;
}

EigenResult dense_path(const CoreSolution& sol, int n_eigs) {
    Operators op(sol);
    TridiagLU lu(op.AN);
    int m = op.n - 1; // Phi reduced space (Dirichlet at y_max)
    double ih2 = 1.0 / (op.h * op.h);

    // columns of AN^{-1} diag(cN) restricted to the reduced block
    std::vector<double> W(static_cast<std::size_t>(m) * m);
    std::vector<double> col(op.n);
    for (int j = 0; j < m; ++j) {
        std::fill(col.begin(), col.end(), 0.0);
        col[j] = op.cN[j];
        lu.solve(col);
        for (int i = 0; i < m; ++i) W[static_cast<std::size_t>(i) * m + j] = col[i];
    }
    std::vector<double> M(static_cast<std::size_t>(m) * m, 0.0);
    for (int i = 0; i < m; ++i) {
        double* row = &M[static_cast<std::size_t>(i) * m];
        if (i == 0) {
            row[0] += -2.0 * ih2;
            row[1] += 2.0 * ih2;
        } else {
            row[i - 1] += ih2;
            row[i] += -2.0 * ih2;
            if (i + 1 < m) row[i + 1] += ih2;
        }
        row[i] += -1.0 + op.cPhi[i];
        double w = op.fc * op.V2[i];
        for (int j = 0; j < m; ++j) row[j] += w * W[static_cast<std::size_t>(i) * m + j];
    }
    auto eig = numerics::dense_eigensolve(M, m, true);

    EigenResult out;
    out.B = sol.B;
    out.beta = sol.beta;
    int keep = std::min<int>(n_eigs, static_cast<int>(eig.values.size()));
    for (int k = 0; k < keep; ++k) out.eigenvalues.push_back(eig.values[k]);
    int n_modes = std::min(keep, 4);
    for (int k = 0; k < keep; ++k) {
        bool want_mode = k < n_modes && std::fabs(eig.values[k].imag()) < 1e-10;
        std::vector<double> phi(m);
        for (int i = 0; i < m; ++i) phi[i] = eig.vecs[k][i].real();
        double mx = 0;
        int arg = 0;
        for (int i = 0; i < m; ++i)
            if (std::fabs(phi[i]) > mx) {
                mx = std::fabs(phi[i]);
                arg = i;
            }
        double scale = phi[arg] != 0 ? 1.0 / phi[arg] : 1.0;
        for (double& v : phi) v *= scale;
        auto N = op.slave(lu, phi);
        out.residuals.push_back(coupled_residual(op, phi, N, eig.values[k].real()));
        if (want_mode) {
            phi.push_back(0.0); // Dirichlet node
            out.modes.push_back({std::move(phi), std::move(N)});
        }
    }
    return out;
}

EigenResult iterative_path(const CoreSolution& sol, int n_eigs) {
    Operators op(sol);
    TridiagLU slave_lu(op.AN); // also validates the slave operator
    int n = op.n;
    double ih2 = 1.0 / (op.h * op.h);

    auto try_sigma = [&](double sigma) {
        BlockTridiag A(n);
        for (int i = 0; i < n; ++i) {
            double* D = A.D(i);
            if (i == n - 1) {
                D[0] = 1.0; // Phi Dirichlet row
                D[1] = 0.0;
            } else {
                D[0] = -2.0 * ih2 - 1.0 + op.cPhi[i] - sigma;
                D[1] = op.fc * op.V2[i];
            }
            D[2] = -op.cN[i];
            D[3] = -2.0 * ih2 - op.V2[i];
            if (i > 0) {
                double* L = A.L(i);
                L[0] = (i == n - 1) ? 0.0 : ih2;
                L[3] = (i == n - 1) ? 2.0 * ih2 : ih2;
            }
            if (i + 1 < n) {
                double* U = A.U(i);
                U[0] = (i == 0) ? 2.0 * ih2 : ih2;
                U[3] = (i == 0) ? 2.0 * ih2 : ih2;
            }
        }
        BlockTridiagLU lu(A);
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            y.assign(2 * n, 0.0);
            for (int i = 0; i < n - 1; ++i) y[2 * i] = x[2 * i]; // mass on Phi rows only
            lu.solve(y);
        };
        return numerics::shift_invert_arnoldi(apply, 2 * n, sigma, 90);
    };

    std::vector<numerics::RitzValue> ritz;
    for (double sigma : {0.6, 0.95, 0.35}) {
        try {
            ritz = try_sigma(sigma);
        } catch (const error&) {
            continue; // shift hit an eigenvalue; try the next one
        }
        if (!ritz.empty()) break;
    }
    if (ritz.empty()) throw eig_solver_failure("shift-invert Arnoldi found no converged eigenvalues");

    EigenResult out;
    out.B = sol.B;
    out.beta = sol.beta;
    int keep = std::min<int>(n_eigs, static_cast<int>(ritz.size()));
    for (int k = 0; k < keep; ++k) {
        out.eigenvalues.push_back(ritz[k].lambda);
        // unpack interleaved (Phi, N), normalize by max |Phi|
        std::vector<double> phi(n), N(n);
        double mx = 0;
        int arg = 0;
        for (int i = 0; i < n; ++i) {
            phi[i] = ritz[k].vector[2 * i].real();
            N[i] = ritz[k].vector[2 * i + 1].real();
            if (std::fabs(phi[i]) > mx) {
                mx = std::fabs(phi[i]);
                arg = i;
            }
        }
        double scale = phi[arg] != 0 ? 1.0 / phi[arg] : 1.0;
        for (int i = 0; i < n; ++i) {
            phi[i] *= scale;
            N[i] *= scale;
        }
        out.residuals.push_back(coupled_residual(op, phi, N, ritz[k].lambda.real()));
        if (k < 4 && std::fabs(ritz[k].lambda.imag()) < 1e-10)
            out.modes.push_back({std::move(phi), std::move(N)});
    }
    return out;
}

} // namespace

EigenResult core_spectrum(const CoreSolution& sol, int n_eigs, EigMethod method) {
    if (n_eigs < 1) throw config_error("n_eigs must be >= 1");
    if (sol.residual_norm > 1e-8)
        throw config_error("core solution residual too large for spectrum analysis");
    switch (method) {
        case EigMethod::DenseSchur: return dense_path(sol, n_eigs);
        case EigMethod::ShiftInvert: return iterative_path(sol, n_eigs);
        case EigMethod::Auto: break;
    }
    if (sol.n() <= 641) return dense_path(sol, n_eigs);
    return iterative_path(sol, n_eigs);
}

std::vector<ScanPoint> stability_scan(const CoreBranch& branch, int max_points) {
    if (branch.samples.size() < 10)
        throw config_error("stability_scan needs a branch with >= 10 samples");
    std::vector<std::size_t> pick;
    std::size_t total = branch.samples.size();
    std::size_t count = std::min<std::size_t>(max_points, total);
    for (std::size_t k = 0; k < count; ++k) pick.push_back(k * (total - 1) / (count - 1));
    std::vector<ScanPoint> out(pick.size());
    std::vector<std::string> failures(pick.size());
    parallel_for(static_cast<std::ptrdiff_t>(pick.size()), [&](std::ptrdiff_t i) {
        const auto& s = branch.samples[pick[i]];
        try {
            auto r = core_spectrum(*s.solution, 1, EigMethod::ShiftInvert);
            out[i] = {s.beta, s.B, r.eigenvalues[0].real()};
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < pick.size(); ++i)
        if (!failures[i].empty())
            throw eig_solver_failure("stability scan failed at beta=" +
                                     std::to_string(branch.samples[pick[i]].beta) + ": " + failures[i]);
    return out;
}

double coupled_eigen_residual(const CoreSolution& sol, const std::vector<double>& Phi0,
                              const std::vector<double>& N0, double lambda) {
    Operators op(sol);
    std::vector<double> phi = Phi0, N = N0;
    double mx = 0;
    for (double v : phi) mx = std::max(mx, std::fabs(v));
    if (mx == 0) throw config_error("zero candidate eigenfunction");
    for (double& v : phi) v /= mx;
    for (double& v : N) v /= mx;
    return coupled_residual(op, phi, N, lambda);
}

void save_modes_csv(const EigenResult& r, const std::vector<double>& y, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << "y";
    for (std::size_t k = 0; k < r.modes.size(); ++k) os << ",Phi0_" << k << ",N0_" << k;
    os << "\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", y[i]);
        os << buf;
        for (const auto& m : r.modes) {
            std::snprintf(buf, sizeof buf, ",%.17g,%.17g", m.Phi0[i], m.N0[i]);
            os << buf;
        }
        os << "\n";
    }
}

nlohmann::json eigenresult_to_json(const EigenResult& r) {
    nlohmann::json ev = nlohmann::json::array();
    for (const auto& l : r.eigenvalues) ev.push_back({l.real(), l.imag()});
    return {{"B", r.B}, {"beta", r.beta}, {"eigenvalues", ev}, {"note", r.note}};
}

} // namespace spikelab::spectrum
