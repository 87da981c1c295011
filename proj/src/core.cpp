#include "spikelab/core.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/numerics/block_tridiag.hpp"
#include "spikelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>

namespace spikelab::core {

using numerics::BlockTridiag;
using numerics::BlockTridiagLU;

namespace {

struct Kinetics {
    ModelKind kind;
    double f; // Brusselator feed fraction, ignored otherwise

    double fc() const { return kind == ModelKind::Brusselator ? f : 1.0; }

    double rhsV(double V, double U) const { return -V + fc() * U * V * V; }
    double rhsU(double V, double U) const {
        return kind == ModelKind::Brusselator ? V - U * V * V : -U * V * V;
    }
    double dV_rhsV(double V, double U) const { return -1.0 + 2.0 * fc() * U * V; }
    double dU_rhsV(double V, double /*U*/) const { return fc() * V * V; }
    double dV_rhsU(double V, double U) const {
        return kind == ModelKind::Brusselator ? 1.0 - 2.0 * U * V : -2.0 * U * V;
    }
    double dU_rhsU(double V, double /*U*/) const { return -V * V; }
};

// Residual of the h^2-scaled discrete system; z interleaved (V_i, U_i).
void residual(const Kinetics& kin, const std::vector<double>& z, double B, double h, int n,
              std::vector<double>& F) {
    double h2 = h * h;
    F.resize(2 * n);
    auto V = [&](int i) { return z[2 * i]; };
    auto U = [&](int i) { return z[2 * i + 1]; };
    F[0] = 2.0 * (V(1) - V(0)) + h2 * kin.rhsV(V(0), U(0));
    F[1] = 2.0 * (U(1) - U(0)) + h2 * kin.rhsU(V(0), U(0));
    for (int i = 1; i + 1 < n; ++i) {
        F[2 * i] = V(i - 1) - 2.0 * V(i) + V(i + 1) + h2 * kin.rhsV(V(i), U(i));
        F[2 * i + 1] = U(i - 1) - 2.0 * U(i) + U(i + 1) + h2 * kin.rhsU(V(i), U(i));
    }
    int m = n - 1;
    F[2 * m] = V(m);
    F[2 * m + 1] = 2.0 * U(m - 1) - 2.0 * U(m) + 2.0 * h * B + h2 * kin.rhsU(V(m), U(m));
}

void jacobian(const Kinetics& kin, const std::vector<double>& z, double h, int n, BlockTridiag& J) {
    double h2 = h * h;
    auto V = [&](int i) { return z[2 * i]; };
    auto U = [&](int i) { return z[2 * i + 1]; };
    {
        double* D = J.D(0);
        D[0] = -2.0 + h2 * kin.dV_rhsV(V(0), U(0));
        D[1] = h2 * kin.dU_rhsV(V(0), U(0));
        D[2] = h2 * kin.dV_rhsU(V(0), U(0));
        D[3] = -2.0 + h2 * kin.dU_rhsU(V(0), U(0));
        double* Up = J.U(0);
        Up[0] = 2.0; Up[1] = 0.0; Up[2] = 0.0; Up[3] = 2.0;
    }
    for (int i = 1; i + 1 < n; ++i) {
        double* L = J.L(i);
        L[0] = 1.0; L[1] = 0.0; L[2] = 0.0; L[3] = 1.0;
        double* D = J.D(i);
        D[0] = -2.0 + h2 * kin.dV_rhsV(V(i), U(i));
        D[1] = h2 * kin.dU_rhsV(V(i), U(i));
        D[2] = h2 * kin.dV_rhsU(V(i), U(i));
        D[3] = -2.0 + h2 * kin.dU_rhsU(V(i), U(i));
        double* Up = J.U(i);
        Up[0] = 1.0; Up[1] = 0.0; Up[2] = 0.0; Up[3] = 1.0;
    }
    int m = n - 1;
    {
        double* L = J.L(m);
        L[0] = 0.0; L[1] = 0.0; L[2] = 0.0; L[3] = 2.0;
        double* D = J.D(m);
        D[0] = 1.0; // Dirichlet V(y_max) = 0
        D[1] = 0.0;
        D[2] = h2 * kin.dV_rhsU(V(m), U(m));
        D[3] = -2.0 + h2 * kin.dU_rhsU(V(m), U(m));
    }
}

double max_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

std::vector<double> grid_points(const GridSpec& g) {
    std::vector<double> y(g.n);
    double h = g.y_max / (g.n - 1);
    for (int i = 0; i < g.n; ++i) y[i] = i * h;
    return y;
}

// Small-B spike limit: V0 = 3/(2 fc Ubar) sech^2(y/2) with Ubar chosen so the
// tail slope matches B; U0 rises along the integrated sech^4 tail.
std::vector<double> analytic_seed(const Kinetics& kin, double B, const std::vector<double>& y) {
    double fc = kin.fc();
    double Ubar = (kin.kind == ModelKind::Brusselator) ? 3.0 * (1.0 - kin.f) / (kin.f * kin.f * B)
                                                       : 3.0 / B;
    std::vector<double> z(2 * y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        double s = 1.0 / std::cosh(0.5 * y[i]);
        double th = std::tanh(0.5 * y[i]);
        z[2 * i] = 1.5 / (fc * Ubar) * s * s;
        z[2 * i + 1] = Ubar + B * (2.0 * std::log(std::cosh(0.5 * y[i])) + 0.5 * th * th);
    }
    z[2 * (y.size() - 1)] = 0.0;
    return z;
}

std::vector<double> resample_seed(const CoreSolution& seed, const std::vector<double>& y) {
    std::vector<double> V = numerics::pchip_resample(seed.y, seed.V0, y);
    std::vector<double> U = numerics::pchip_resample(seed.y, seed.U0, y);
    std::vector<double> z(2 * y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
        z[2 * i] = std::max(V[i], 0.0);
        z[2 * i + 1] = U[i];
    }
    // outside the seed's range the tail continues linearly with slope B
    for (std::size_t i = 0; i < y.size(); ++i)
        if (y[i] > seed.y_max()) {
            z[2 * i] = 0.0;
            z[2 * i + 1] = seed.B * y[i] + seed.C;
        }
    z[2 * (y.size() - 1)] = 0.0;
    return z;
}

struct NewtonOutcome {
    bool converged = false;
    double residual = 0;
    int iterations = 0;
};

// Damped Newton; when pin_beta is set, B is freed as a bordered unknown and
// the scalar constraint U0(0)V0(0) = beta closes the system.
NewtonOutcome newton_core(const Kinetics& kin, std::vector<double>& z, double& B,
                          std::optional<double> pin_beta, double h, int n,
                          double tol = 1e-11, int max_iter = 50) {
    NewtonOutcome out;
    std::vector<double> F;
    BlockTridiag J(n);
    residual(kin, z, B, h, n, F);
    double g = pin_beta ? z[0] * z[1] - *pin_beta : 0.0;
    double nrm = std::max(max_norm(F), std::fabs(g));
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        if (nrm < tol) {
            out.converged = true;
            break;
        }
        jacobian(kin, z, h, n, J);
        BlockTridiagLU lu(J);
        std::vector<double> step;
        double dB = 0.0;
        if (pin_beta) {
            std::vector<double> b(2 * n, 0.0);
            b[2 * n - 1] = 2.0 * h; // dF/dB in the far-field Robin row
            std::vector<double> c(2 * n, 0.0);
            c[0] = z[1]; // d(V0 U0)/dV0
            c[1] = z[0];
            std::vector<double> r(2 * n);
            for (int i = 0; i < 2 * n; ++i) r[i] = -F[i];
            if (!numerics::solve_bordered(lu, b, c, 0.0, r, -g, step, dB))
                return out;
        } else {
            step = F;
            for (double& s : step) s = -s;
            lu.solve(step);
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 20; ++back) {
            std::vector<double> zn = z;
            for (int i = 0; i < 2 * n; ++i) zn[i] += lambda * step[i];
            double Bn = B + lambda * dB;
            std::vector<double> Fn;
            residual(kin, zn, Bn, h, n, Fn);
            double gn = pin_beta ? zn[0] * zn[1] - *pin_beta : 0.0;
            double nn = std::max(max_norm(Fn), std::fabs(gn));
            if (std::isfinite(nn) && (nn < nrm || nn < tol)) {
                z.swap(zn);
                B = Bn;
                F.swap(Fn);
                g = gn;
                nrm = nn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    out.residual = nrm;
    if (nrm < tol) out.converged = true;
    return out;
}

CoreSolution pack_solution(const Kinetics& kin, const std::vector<double>& y,
                           const std::vector<double>& z, double B, double residual_norm) {
    CoreSolution s;
    s.kind = kin.kind;
    s.f = kin.f;
    s.y = y;
    int n = static_cast<int>(y.size());
    s.V0.resize(n);
    s.U0.resize(n);
    for (int i = 0; i < n; ++i) {
        s.V0[i] = z[2 * i];
        s.U0[i] = z[2 * i + 1];
    }
    s.B = B;
    s.beta = s.U0[0] * s.V0[0];
    s.residual_norm = residual_norm;
    auto [C, dev] = farfield_constant(s);
    s.C = C;
    s.tail_deviation = dev;
    return s;
}

Kinetics make_kinetics(ModelKind kind, std::optional<double> f) {
    if (kind == ModelKind::GM)
        throw config_error("the GM model has no nontrivial core problem (explicit homoclinic)");
    if (kind == ModelKind::Brusselator) {
        if (!f || !(*f > 0 && *f < 1)) throw config_error("Brusselator core needs f in (0,1)");
        return {kind, *f};
    }
    return {kind, 0.0};
}

GridSpec resolve_grid(ModelKind kind, GridSpec g) {
    GridSpec def = default_grid(kind);
    if (g.y_max <= 0) g.y_max = def.y_max;
    if (g.n <= 0) g.n = static_cast<int>(std::lround(g.y_max * 200.0)) + 1;
    if (g.y_max < 12.0) throw config_error("core grid needs y_max >= 12");
    if (g.n < 800) throw config_error("core grid needs n >= 800");
    return g;
}

// State walked along the solution branch.
struct WalkPoint {
    std::vector<double> z;
    double B = 0, beta = 0;
    NewtonOutcome last;
};

// Steps along the branch toward decreasing beta: B-led away from the fold,
// beta-led once the branch steepens (|dbeta/dB| > slope_switch) so the fold
// can be traversed. visit() is called at every accepted point; returning
// false stops the walk.
void walk_branch(const Kinetics& kin, const std::vector<double>& y, double h, int n,
                 const StepControl& st, double beta_lo,
                 const std::function<bool(const WalkPoint&)>& visit) {
    WalkPoint p;
    p.B = 0.01;
    p.z = analytic_seed(kin, p.B, y);
    p.last = newton_core(kin, p.z, p.B, std::nullopt, h, n);
    if (!p.last.converged) throw newton_diverged("core branch bootstrap failed");
    p.beta = p.z[0] * p.z[1];
    if (!visit(p)) return;

    bool beta_led = false;
    double dB = st.dB_max, dbeta = st.dbeta_max;
    int samples = 1;
    while (p.beta > beta_lo && samples < st.max_samples) {
        if (!beta_led) {
            double Bn = p.B + dB;
            std::vector<double> ztry = p.z;
            auto res = newton_core(kin, ztry, Bn, std::nullopt, h, n);
            double beta_n = ztry[0] * ztry[1];
            double slope = std::fabs((beta_n - p.beta) / dB);
            if (res.converged && slope <= st.slope_switch) {
                p.z.swap(ztry);
                p.B = Bn;
                p.beta = beta_n;
                p.last = res;
                ++samples;
                if (!visit(p)) return;
                if (res.iterations <= 5) dB = std::min(dB * 1.3, st.dB_max);
                continue;
            }
            dB *= 0.4;
            if (dB < 1e-4) beta_led = true; // fold region reached
            continue;
        }
        double beta_n = std::max(p.beta - dbeta, beta_lo);
        std::vector<double> ztry = p.z;
        double Bn = p.B;
        auto res = newton_core(kin, ztry, Bn, beta_n, h, n);
        if (!res.converged) {
            dbeta *= 0.4;
            if (dbeta < st.dbeta_min)
                throw step_failure("core branch step underflow at beta=" + std::to_string(p.beta));
            continue;
        }
        p.z.swap(ztry);
        p.B = Bn;
        p.beta = beta_n;
        p.last = res;
        ++samples;
        if (!visit(p)) return;
        if (res.iterations <= 5) dbeta = std::min(dbeta * 1.3, st.dbeta_max);
        if (p.beta <= beta_lo) return;
    }
}

} // namespace

GridSpec default_grid(models::ModelKind kind) {
    if (kind == ModelKind::Brusselator) return {20.0, 4001};
    return {16.0, 3201};
}

CoreSolution solve_core(ModelKind kind, std::optional<double> f, CoreTarget target,
                        GridSpec grid, const CoreSolution* seed) {
    Kinetics kin = make_kinetics(kind, f);
    grid = resolve_grid(kind, grid);
    auto y = grid_points(grid);
    double h = y[1] - y[0];
    int n = grid.n;

    if (target.pin == CoreTarget::Pin::B) {
        double B = target.value;
        if (!(B > 0)) throw config_error("target B must be positive");
        if (seed) {
            std::vector<double> z = resample_seed(*seed, y);
            auto res = newton_core(kin, z, B, std::nullopt, h, n);
            if (!res.converged)
                throw newton_diverged("core solve from seed did not converge at B=" + std::to_string(B));
            return pack_solution(kin, y, z, B, res.residual);
        }
        std::vector<double> z = analytic_seed(kin, B, y);
        auto res = newton_core(kin, z, B, std::nullopt, h, n);
        if (res.converged) return pack_solution(kin, y, z, B, res.residual);
        // continuation fallback: march B up the primary branch
        double Bh = 0.01;
        z = analytic_seed(kin, Bh, y);
        res = newton_core(kin, z, Bh, std::nullopt, h, n);
        double dB = 0.05;
        while (res.converged && Bh < target.value) {
            double next = std::min(Bh + dB, target.value);
            std::vector<double> ztry = z;
            double Bn = next;
            auto r2 = newton_core(kin, ztry, Bn, std::nullopt, h, n);
            if (r2.converged) {
                z.swap(ztry);
                Bh = next;
                res = r2;
                dB = std::min(dB * 1.4, 0.1);
            } else {
                dB *= 0.4;
                if (dB < 1e-8) break;
            }
        }
        if (!res.converged || Bh < target.value)
            throw no_solution("no primary-branch core solution at B=" + std::to_string(target.value) +
                              " (continuation stalled at B=" + std::to_string(Bh) +
                              "; target likely exceeds the fold B_c)");
        return pack_solution(kin, y, z, Bh, res.residual);
    }

    // beta-pinned
    double beta_target = target.value;
    double beta_lim = 1.5 / kin.fc();
    if (!(beta_target > 0) || beta_target >= beta_lim)
        throw config_error("target beta must lie in (0, " + std::to_string(beta_lim) + ")");
    if (seed) {
        std::vector<double> z = resample_seed(*seed, y);
        double B = seed->B;
        auto res = newton_core(kin, z, B, beta_target, h, n);
        if (res.converged) return pack_solution(kin, y, z, B, res.residual);
        // fall through to the branch walk when the seed is too far away
    }
    std::optional<CoreSolution> found;
    walk_branch(kin, y, h, n, StepControl{}, beta_target, [&](const WalkPoint& p) {
        if (p.beta <= beta_target + 1e-12) {
            std::vector<double> z = p.z;
            double B = p.B;
            auto res = newton_core(kin, z, B, beta_target, h, n);
            if (res.converged) found = pack_solution(kin, y, z, B, res.residual);
            return false;
        }
        return true;
    });
    if (!found) throw newton_diverged("beta-targeted core solve failed");
    return *found;
}

double flux_quadrature(const CoreSolution& sol) {
    int n = sol.n();
    double h = sol.h();
    std::vector<double> q(n);
    for (int i = 0; i < n; ++i) q[i] = sol.U0[i] * sol.V0[i] * sol.V0[i];
    double s = 0;
    int pairs = (n - 1) / 2;
    for (int p = 0; p < pairs; ++p) {
        int i = 2 * p;
        s += h / 3.0 * (q[i] + 4.0 * q[i + 1] + q[i + 2]);
    }
    if ((n - 1) % 2 == 1) s += 0.5 * h * (q[n - 2] + q[n - 1]);
    if (sol.kind == ModelKind::Brusselator) s *= (1.0 - sol.f);
    return s;
}

std::pair<std::vector<double>, double> fold_null_vector_V(const CoreSolution& sol) {
    Kinetics kin{sol.kind, sol.f};
    int n = sol.n();
    double h = sol.h();
    std::vector<double> z(2 * n);
    for (int i = 0; i < n; ++i) {
        z[2 * i] = sol.V0[i];
        z[2 * i + 1] = sol.U0[i];
    }
    BlockTridiag J(n);
    jacobian(kin, z, h, n, J);
    BlockTridiagLU lu(J);
    std::vector<double> x(2 * n);
    for (int i = 0; i < 2 * n; ++i) x[i] = std::sin(0.37 * i) + 0.5; // deterministic start
    double lambda = 0;
    for (int it = 0; it < 40; ++it) {
        lu.solve(x);
        double nrm = 0;
        for (double v : x) nrm = std::max(nrm, std::fabs(v));
        for (double& v : x) v /= nrm;
        // Rayleigh-style estimate through one matrix application
        std::vector<double> Jx(2 * n);
        J.multiply(x.data(), Jx.data());
        double num = 0, den = 0;
        for (int i = 0; i < 2 * n; ++i) {
            num += x[i] * Jx[i];
            den += x[i] * x[i];
        }
        lambda = num / den;
        if (it > 4 && std::fabs(lambda) < 1e-12) break;
    }
    std::vector<double> V(n);
    double mx = 0;
    int arg = 0;
    for (int i = 0; i < n; ++i) {
        V[i] = x[2 * i];
        if (std::fabs(V[i]) > mx) {
            mx = std::fabs(V[i]);
            arg = i;
        }
    }
    double s = V[arg] != 0 ? 1.0 / V[arg] : 1.0;
    for (double& v : V) v *= s;
    // eigenvalue of the h^2-scaled rows; rescale to the unscaled operator
    return {V, lambda / (h * h)};
}

std::pair<double, double> farfield_constant(const CoreSolution& sol) {
    int n = sol.n();
    int i0 = static_cast<int>(std::ceil(0.7 * (n - 1)));
    int i1 = static_cast<int>(std::floor(0.9 * (n - 1)));
    double mean = 0;
    for (int i = i0; i <= i1; ++i) mean += sol.U0[i] - sol.B * sol.y[i];
    mean /= (i1 - i0 + 1);
    double dev = 0;
    for (int i = i0; i <= i1; ++i)
        dev = std::max(dev, std::fabs(sol.U0[i] - sol.B * sol.y[i] - mean));
    if (dev > 1e-3)
        throw tail_not_linear("tail fit deviation " + std::to_string(dev) +
                              " exceeds 1e-3; increase y_max");
    return {mean, dev};
}

std::vector<BranchSample> CoreBranch::primary_samples() const {
    std::vector<BranchSample> out;
    double beta_c = fold ? fold->beta_c : -1.0;
    for (const auto& s : samples)
        if (!fold || s.beta > beta_c) out.push_back(s);
    if (fold) out.push_back({fold->B_c, fold->beta_c, fold->solution->C, fold->solution});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.B < b.B; });
    return out;
}

CoreBranch continue_core_branch(ModelKind kind, std::optional<double> f,
                                std::pair<double, double> beta_range, StepControl step,
                                GridSpec grid) {
    Kinetics kin = make_kinetics(kind, f);
    grid = resolve_grid(kind, grid);
    auto y = grid_points(grid);
    double h = y[1] - y[0];
    int n = grid.n;
    double beta_lim = 1.5 / kin.fc();
    double beta_lo = beta_range.first > 0 ? beta_range.first : 0.45 * beta_lim;
    double beta_hi = beta_range.second > 0 ? beta_range.second : beta_lim;

    CoreBranch branch;
    branch.kind = kind;
    branch.f = kin.f;

    int fold_bracket = -1;
    walk_branch(kin, y, h, n, step, beta_lo, [&](const WalkPoint& p) {
        if (p.beta > beta_hi) return true; // keep walking, record below the cap
        auto sol = std::make_shared<CoreSolution>(pack_solution(kin, y, p.z, p.B, p.last.residual));
        branch.samples.push_back({sol->B, sol->beta, sol->C, sol});
        std::size_t k = branch.samples.size();
        if (fold_bracket < 0 && k >= 2 && branch.samples[k - 1].B < branch.samples[k - 2].B - 1e-13)
            fold_bracket = static_cast<int>(k - 1);
        if (fold_bracket > 0 && step.stop_after_fold &&
            p.beta < branch.samples[fold_bracket].beta - 10 * step.dbeta_max)
            return false;
        return true;
    });

    if (fold_bracket > 0) {
        // bisection on the sign of dB/dbeta over the bracketing samples
        int ilo = fold_bracket;
        int ihi = std::max(fold_bracket - 2, 0);
        double blo = branch.samples[ilo].beta; // past the fold (dB/dbeta > 0)
        double bhi = branch.samples[ihi].beta; // primary side (dB/dbeta < 0)
        std::vector<double> zf = resample_seed(*branch.samples[fold_bracket - 1].solution, y);
        double Bf = branch.samples[fold_bracket - 1].B;
        auto B_at = [&](double bta) {
            std::vector<double> z1 = zf;
            double B1 = Bf;
            if (!newton_core(kin, z1, B1, bta, h, n).converged)
                throw newton_diverged("fold refinement solve failed");
            return B1;
        };
        for (int it = 0; it < 40; ++it) {
            double mid = 0.5 * (blo + bhi);
            // probe width keeps the slope sign above the Newton noise floor
            double delta = 1e-5;
            double slope = B_at(mid + delta) - B_at(mid - delta);
            if (slope < 0)
                bhi = mid; // still on the primary side
            else
                blo = mid;
            if (bhi - blo < 2e-6) break;
        }
        double beta_c = 0.5 * (blo + bhi);
        std::vector<double> zc = zf;
        double Bc = Bf;
        auto res = newton_core(kin, zc, Bc, beta_c, h, n);
        if (!res.converged) throw newton_diverged("fold solve failed");
        auto sol = std::make_shared<CoreSolution>(pack_solution(kin, y, zc, Bc, res.residual));
        branch.fold = FoldPoint{sol->B, sol->beta, sol};
    }
    return branch;
}

double CoreTables::C(double B) const {
    if (B <= B_lo) return C_of_B(B_lo) * B_lo / std::max(B, 1e-12); // 1/B small-B tail
    if (B >= Bc) return C_at_Bc;
    return C_of_B(B);
}

CoreTables primary_tables(const CoreBranch& branch) {
    if (!branch.fold) throw error("NoFold", "primary_tables needs a branch with a located fold");
    CoreTables t;
    t.Bc = branch.fold->B_c;
    t.beta_c = branch.fold->beta_c;
    t.C_at_Bc = branch.fold->solution->C;
    auto prim = branch.primary_samples();
    std::vector<double> Bs, Cs;
    for (const auto& s : prim) {
        if (!Bs.empty() && s.B <= Bs.back() + 1e-12) continue;
        Bs.push_back(s.B);
        Cs.push_back(s.C);
    }
    if (Bs.size() < 4) throw error("TableTooSmall", "primary branch has too few samples");
    t.C_of_B = numerics::Pchip(Bs, Cs);
    t.B_lo = Bs.front();
    return t;
}

std::vector<BcEntry> bc_table(const std::vector<double>& f_grid, GridSpec grid) {
    std::vector<BcEntry> table(f_grid.size());
    std::vector<std::string> failures(f_grid.size());
    parallel_for(static_cast<std::ptrdiff_t>(f_grid.size()), [&](std::ptrdiff_t i) {
        try {
            StepControl st;
            st.stop_after_fold = true;
            CoreBranch br = continue_core_branch(ModelKind::Brusselator, f_grid[i], {0, 0}, st, grid);
            if (!br.fold) throw error("NoFold", "no fold found");
            table[i] = {f_grid[i], br.fold->B_c, br.fold->solution->C};
        } catch (const std::exception& e) {
            failures[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < f_grid.size(); ++i)
        if (!failures[i].empty())
            throw error("BcTableFailure",
                        "fold continuation failed at f=" + std::to_string(f_grid[i]) + ": " + failures[i]);
    return table;
}

namespace {
void write_line(std::ofstream& os, const char* fmt, auto... args) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, args...);
    os << buf;
}
} // namespace

void save_bc_table_csv(const std::vector<BcEntry>& table, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << "f,B_c,C_b_at_Bc\n";
    for (const auto& e : table) write_line(os, "%.17g,%.17g,%.17g\n", e.f, e.Bc, e.Cb_at_Bc);
}

std::vector<BcEntry> load_bc_table_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw io_error("cannot open " + path);
    std::string line;
    std::getline(is, line); // header
    std::vector<BcEntry> out;
    while (std::getline(is, line)) {
        BcEntry e;
        if (std::sscanf(line.c_str(), "%lg,%lg,%lg", &e.f, &e.Bc, &e.Cb_at_Bc) == 3) out.push_back(e);
    }
    return out;
}

void save_solution_csv(const CoreSolution& sol, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << "y,V0,U0\n";
    for (int i = 0; i < sol.n(); ++i)
        write_line(os, "%.17g,%.17g,%.17g\n", sol.y[i], sol.V0[i], sol.U0[i]);
}

void save_branch_csv(const CoreBranch& branch, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << "f,B,beta,C,is_fold\n";
    for (const auto& s : branch.samples)
        write_line(os, "%.17g,%.17g,%.17g,%.17g,0\n", branch.f, s.B, s.beta, s.C);
    if (branch.fold)
        write_line(os, "%.17g,%.17g,%.17g,%.17g,1\n", branch.f, branch.fold->B_c, branch.fold->beta_c,
                   branch.fold->solution->C);
}

} // namespace spikelab::core
