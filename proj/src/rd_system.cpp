#include "spikelab/rd_system.hpp"
#include "spikelab/core.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/numerics/interp.hpp"
#include "spikelab/outer.hpp"
#include "spikelab/parallel.hpp"

#include <algorithm>
#include <cmath>

namespace spikelab::rd {

using numerics::BlockTridiag;

void Assembly::rhs(const std::vector<double>& z, double L, std::vector<double>& F) const {
    double eps_L2 = (model.epsilon / L) * (model.epsilon / L);
    double D_L = model.bigD / (L * L);
    double ih2 = 1.0 / (h * h);
    F.resize(2 * N);
    auto lap = [&](int i, int comp) {
        auto at = [&](int k) { return z[2 * k + comp]; };
        if (i == 0) return 2.0 * (at(1) - at(0)) * ih2;
        if (i == N - 1) return 2.0 * (at(N - 2) - at(N - 1)) * ih2;
        return (at(i - 1) - 2.0 * at(i) + at(i + 1)) * ih2;
    };
    double dil = dilution ? rho : 0.0;
    switch (model.kind) {
        case ModelKind::Schnakenberg: {
            double a = model.schnakenberg().a, b = model.schnakenberg().b;
            parallel_for_grain(N, 8192, [&](std::ptrdiff_t i) {
                double v = z[2 * i], u = z[2 * i + 1];
                F[2 * i] = eps_L2 * lap(static_cast<int>(i), 0) - v + a + u * v * v - dil * v;
                F[2 * i + 1] = D_L * lap(static_cast<int>(i), 1) + b - u * v * v - dil * u;
            });
            break;
        }
        case ModelKind::Brusselator: {
            double a = model.brusselator().a, f = model.brusselator().f;
            parallel_for_grain(N, 8192, [&](std::ptrdiff_t i) {
                double v = z[2 * i], u = z[2 * i + 1];
                F[2 * i] = eps_L2 * lap(static_cast<int>(i), 0) - v + a + f * u * v * v - dil * v;
                F[2 * i + 1] = D_L * lap(static_cast<int>(i), 1) + v - u * v * v - dil * u;
            });
            break;
        }
        case ModelKind::GM: {
            double kappa = model.gm().kappa, tau = model.gm().tau;
            parallel_for_grain(N, 8192, [&](std::ptrdiff_t i) {
                double A = z[2 * i], H = z[2 * i + 1];
                F[2 * i] = eps_L2 * lap(static_cast<int>(i), 0) - A + A * A / H + kappa - dil * A;
                F[2 * i + 1] = D_L * lap(static_cast<int>(i), 1) - H + A * A - dil * tau * H;
            });
            break;
        }
    }
}

void Assembly::newton_matrix(const std::vector<double>& z, double L, double shift,
                             BlockTridiag& J) const {
    double eps_L2 = (model.epsilon / L) * (model.epsilon / L);
    double D_L = model.bigD / (L * L);
    double ih2 = 1.0 / (h * h);
    double dil = dilution ? rho : 0.0;
    parallel_for_grain(N, 8192, [&](std::ptrdiff_t ii) {
        int i = static_cast<int>(ii);
        double v = z[2 * i], u = z[2 * i + 1];
        double rvv = 0, rvu = 0, ruv = 0, ruu = 0;
        switch (model.kind) {
            case ModelKind::Schnakenberg:
                rvv = -1.0 + 2.0 * u * v - dil;
                rvu = v * v;
                ruv = -2.0 * u * v;
                ruu = -v * v - dil;
                break;
            case ModelKind::Brusselator: {
                double f = model.brusselator().f;
                rvv = -1.0 + 2.0 * f * u * v - dil;
                rvu = f * v * v;
                ruv = 1.0 - 2.0 * u * v;
                ruu = -v * v - dil;
                break;
            }
            case ModelKind::GM: {
                double tau = model.gm().tau;
                rvv = -1.0 + 2.0 * v / u - dil;
                rvu = -v * v / (u * u);
                ruv = 2.0 * v;
                ruu = -1.0 - dil * tau;
                break;
            }
        }
        double dV = -2.0 * eps_L2 * ih2, dU = -2.0 * D_L * ih2;
        double* D = J.D(i);
        D[0] = shift * mass(2 * i) - (dV + rvv);
        D[1] = -rvu;
        D[2] = -ruv;
        D[3] = shift * mass(2 * i + 1) - (dU + ruu);
        double ov = eps_L2 * ih2, ou = D_L * ih2;
        if (i > 0) {
            double* Lb = J.L(i);
            Lb[0] = -((i == N - 1) ? 2.0 * ov : ov);
            Lb[1] = 0;
            Lb[2] = 0;
            Lb[3] = -((i == N - 1) ? 2.0 * ou : ou);
        }
        if (i < N - 1) {
            double* Ub = J.U(i);
            Ub[0] = -((i == 0) ? 2.0 * ov : ov);
            Ub[1] = 0;
            Ub[2] = 0;
            Ub[3] = -((i == 0) ? 2.0 * ou : ou);
        }
    });
}

void Assembly::rhs_L_derivative(const std::vector<double>& z, double L,
                                std::vector<double>& FL) const {
    double eps_L2 = (model.epsilon / L) * (model.epsilon / L);
    double D_L = model.bigD / (L * L);
    double ih2 = 1.0 / (h * h);
    FL.assign(2 * N, 0.0);
    auto lap = [&](int i, int comp) {
        auto at = [&](int k) { return z[2 * k + comp]; };
        if (i == 0) return 2.0 * (at(1) - at(0)) * ih2;
        if (i == N - 1) return 2.0 * (at(N - 2) - at(N - 1)) * ih2;
        return (at(i - 1) - 2.0 * at(i) + at(i + 1)) * ih2;
    };
    for (int i = 0; i < N; ++i) {
        FL[2 * i] = -2.0 / L * eps_L2 * lap(i, 0);
        FL[2 * i + 1] = -2.0 / L * D_L * lap(i, 1);
    }
}

double Assembly::residual_floor(const std::vector<double>& z, double L) const {
    double eps_L2 = (model.epsilon / L) * (model.epsilon / L);
    double D_L = model.bigD / (L * L);
    double mv = 0, mu = 0;
    for (int i = 0; i < N; ++i) {
        mv = std::max(mv, std::fabs(z[2 * i]));
        mu = std::max(mu, std::fabs(z[2 * i + 1]));
    }
    double ih2 = 1.0 / (h * h);
    return 8.0 * 2.2e-16 * ih2 * std::max(eps_L2 * mv, D_L * mu) + 1e-14;
}

std::vector<double> x_grid(int n) {
    std::vector<double> x(n + 1);
    for (int i = 0; i <= n; ++i) x[i] = -1.0 + 2.0 * double(i) / n;
    return x;
}

std::vector<double> composite_state(const ModelSpec& model, double L, int n,
                                    const std::vector<double>& positions, double ell) {
    if (positions.empty()) throw config_error("composite_state needs spike positions");
    auto xs = x_grid(n);
    int N = n + 1;
    std::vector<double> z(2 * N, 0.0);
    double eps_L = model.epsilon / L;
    double D_L = model.bigD / (L * L);
    auto solve = outer::solve_quasi_equilibrium_ell(model, ell, L);

    // distance to the nearest spike center; the canonical cell coordinate
    std::vector<double> d(N);
    for (int i = 0; i < N; ++i) {
        double dist = 1e9;
        for (double p : positions) dist = std::min(dist, std::fabs(xs[i] - p));
        d[i] = std::min(dist, ell);
    }
    auto v_out = outer::outer_profile(model, solve, d);

    if (model.kind == ModelKind::GM) {
        double kappa = model.gm().kappa;
        double H0L = solve.H0L;
        double gamma = solve.v0plus / H0L;
        double om = std::sqrt(1.0 - 2.0 * gamma);
        for (int i = 0; i < N; ++i) {
            double y = d[i] / eps_L;
            double w0 = 1.5 * (1.0 - 2.0 * gamma) / std::pow(std::cosh(0.5 * om * y), 2);
            z[2 * i] = H0L * w0 + v_out[i];
            z[2 * i + 1] = v_out[i] * v_out[i] / (v_out[i] - kappa);
        }
        return z;
    }

    std::optional<double> f = model.kind == ModelKind::Brusselator
                                  ? std::optional<double>(model.brusselator().f)
                                  : std::nullopt;
    auto tables = outer::core_tables(model.kind, f ? *f : 0.0);
    auto core_sol =
        core::solve_core(model.kind, f, core::CoreTarget::pin_B(std::min(solve.B, tables->Bc)));
    numerics::Pchip V0(core_sol.y, core_sol.V0), U0(core_sol.y, core_sol.U0);
    double a = model.kind == ModelKind::Brusselator ? model.brusselator().a : model.schnakenberg().a;
    double fc = model.kind == ModelKind::Brusselator ? model.brusselator().f : 1.0;
    double sD = std::sqrt(D_L);
    double eps_s = model.eps_over_sqrtD();
    for (int i = 0; i < N; ++i) {
        double y = d[i] / eps_L;
        double Vi = y <= core_sol.y_max() ? std::max(V0(y), 0.0) : 0.0;
        double Ui = y <= core_sol.y_max() ? U0(y) : core_sol.B * y + core_sol.C;
        double u_out = (v_out[i] - a) / (fc * v_out[i] * v_out[i]);
        double common = core_sol.B * d[i] / sD + core_sol.C * eps_s;
        z[2 * i] = sD / eps_L * Vi + v_out[i];
        z[2 * i + 1] = std::max(eps_L / sD * Ui + u_out - common, 1e-12);
    }
    return z;
}

} // namespace spikelab::rd
