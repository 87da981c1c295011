#include "spikelab/continuation.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/io.hpp"
#include "spikelab/numerics/eig.hpp"
#include "spikelab/outer.hpp"
#include "spikelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>

namespace spikelab::continuation {

using numerics::BlockTridiag;
using numerics::BlockTridiagLU;

namespace {

double max_norm(const std::vector<double>& v) {
    double m = 0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
}

double rms(const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x * x;
    return std::sqrt(s / v.size());
}

void symmetrize_even(std::vector<double>& z, int N) {
    for (int i = 0; i < N / 2; ++i) {
        int j = N - 1 - i;
        for (int c = 0; c < 2; ++c) {
            double avg = 0.5 * (z[2 * i + c] + z[2 * j + c]);
            z[2 * i + c] = avg;
            z[2 * j + c] = avg;
        }
    }
}

struct NewtonOut {
    bool ok = false;
    double residual = 0;
    int iterations = 0;
    int det_sign = 1;
};

NewtonOut newton_steady(const rd::Assembly& asm_, std::vector<double>& z, double L,
                        bool symmetrize, double tol = 1e-9, int max_iter = 40) {
    NewtonOut out;
    int N = asm_.N;
    std::vector<double> F, step;
    BlockTridiag J(N);
    asm_.rhs(z, L, F);
    tol = std::max(tol, asm_.residual_floor(z, L));
    double nrm = max_norm(F);
    for (int it = 0; it < max_iter; ++it) {
        out.iterations = it;
        if (nrm < tol) {
            out.ok = true;
            break;
        }
        asm_.newton_matrix(z, L, 0.0, J); // J = -dF/dz
        BlockTridiagLU lu(J);
        out.det_sign = lu.det_sign();
        step = F;
        lu.solve(step); // dz = (-dF/dz)^{-1} F solves F + dF*dz = 0
        double lambda = 1.0;
        bool accepted = false;
        for (int back = 0; back < 18; ++back) {
            std::vector<double> zn = z;
            for (std::size_t i = 0; i < zn.size(); ++i) zn[i] += lambda * step[i];
            if (symmetrize) symmetrize_even(zn, N);
            std::vector<double> Fn;
            asm_.rhs(zn, L, Fn);
            double nn = max_norm(Fn);
            if (std::isfinite(nn) && (nn < nrm || nn < tol)) {
                z.swap(zn);
                F.swap(Fn);
                nrm = nn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) break;
    }
    out.residual = nrm;
    if (nrm < tol) out.ok = true;
    return out;
}

BranchPoint make_point(const ModelSpec& model, int n, double L, const std::vector<double>& z,
                       double residual) {
    auto st = std::make_shared<SteadyState>();
    st->model = model;
    st->n = n;
    st->L = L;
    st->z = z;
    st->residual = residual;
    BranchPoint p;
    p.L = L;
    p.measure_mu = st->measure_mu();
    p.measure_u0v0 = st->measure_u0v0();
    p.l2norm_v = st->l2norm_v();
    p.state = st;
    return p;
}

} // namespace

double SteadyState::measure_u0v0() const {
    int c = n / 2; // x = 0 node (n is even in practice)
    return z[2 * c] * z[2 * c + 1];
}

double SteadyState::l2norm_v() const {
    double h = 2.0 / n;
    double s = 0;
    for (int i = 0; i <= n; ++i) {
        double w = (i == 0 || i == n) ? 0.5 : 1.0;
        s += w * z[2 * i] * z[2 * i];
    }
    return std::sqrt(s * h);
}

double SteadyState::even_asymmetry() const {
    double m = 0;
    for (int i = 0; i <= n; ++i) m = std::max(m, std::fabs(z[2 * i] - z[2 * (n - i)]));
    return m;
}

SteadyState steady_solve(const ModelSpec& model, double L, int n, std::vector<double> z_init,
                         bool symmetrize) {
    model.validate();
    if (static_cast<int>(z_init.size()) != 2 * (n + 1))
        throw config_error("steady_solve initial state has wrong size");
    rd::Assembly asm_(model, n);
    auto res = newton_steady(asm_, z_init, L, symmetrize);
    if (!res.ok)
        throw newton_diverged("steady solve stalled at residual " + std::to_string(res.residual) +
                              " (L=" + std::to_string(L) + ")");
    SteadyState st;
    st.model = model;
    st.n = n;
    st.L = L;
    st.z = std::move(z_init);
    st.residual = res.residual;
    return st;
}

std::vector<double> pattern_positions(int half_spikes, bool boundary_phase) {
    if (half_spikes < 1) throw config_error("half_spikes must be >= 1");
    int m = half_spikes;
    std::vector<double> pos;
    if (m % 2 == 1 || boundary_phase) {
        // boundary-anchored: spikes at -1 + 4k/m while inside the domain
        for (int k = 0; -1.0 + 4.0 * k / m <= 1.0 + 1e-12; ++k)
            pos.push_back(std::min(-1.0 + 4.0 * k / m, 1.0));
    } else {
        // interior-centered: m/2 spikes at odd multiples of 2/m
        for (int k = 0; k < m / 2; ++k) pos.push_back(-1.0 + (2.0 * k + 1.0) * 2.0 / m);
    }
    return pos;
}

SteadyState steady_solve_pattern(const ModelSpec& model, double L, int n, int half_spikes,
                                 bool boundary_phase) {
    auto pos = pattern_positions(half_spikes, boundary_phase);
    double ell = 2.0 / half_spikes;
    auto z = rd::composite_state(model, L, n, pos, ell);
    return steady_solve(model, L, n, std::move(z));
}

SteadyBranch continue_in_L(const ModelSpec& model, const SteadyState& start, int direction,
                           const ContinueOptions& opts) {
    if (direction != 1 && direction != -1) throw config_error("direction must be +-1");
    rd::Assembly asm_(model, start.n);
    int N = asm_.N;
    SteadyBranch branch;

    std::vector<double> z = start.z;
    double L = start.L;
    branch.points.push_back(make_point(model, start.n, L, z, start.residual));

    // weighted metric: the z block contributes its RMS relative change, so
    // the parameter direction is not drowned by the 2N field components
    auto weight = [&](const std::vector<double>& zz) {
        return 1.0 / (std::max(rms(zz), 1e-12) * std::sqrt(2.0 * N));
    };
    double wz = weight(z);
    std::vector<double> tz(2 * N, 0.0);
    double tL = direction;
    double ds = opts.ds0;
    int last_det = 0;
    double prev_dL = 0;

    std::vector<double> F(2 * N), FL(2 * N), b(2 * N), c(2 * N), r(2 * N), dz(2 * N);
    BlockTridiag J(N);

    auto stability_at = [&](BranchPoint& p) {
        if (!opts.compute_stability) return;
        try {
            auto eigs = branch_stability(*p.state);
            p.stability = stability_verdict(eigs, model.epsilon, &p.lambda_max_re);
        } catch (const error& e) {
            branch.notes.push_back(std::string("stability failed at L=") + std::to_string(p.L) +
                                   ": " + e.what());
        }
    };
    stability_at(branch.points.back());

    // one damped bordered Newton solve of F(z,L)=0 with the scalar row
    // cvec.dz + cL.dL = target - value; shared by both parameterizations
    auto bordered_solve = [&](std::vector<double>& zc, double& Lc,
                              const std::function<double(const std::vector<double>&, double)>& cons,
                              const std::function<void(const std::vector<double>&, std::vector<double>&, double&)>& cons_grad) {
        // the scalar constraint row is (bi)linear: Newton drives it to
        // rounding level; require that explicitly rather than folding it
        // into the residual scale
        double cons_scale = 1e-10 * (1.0 + std::fabs(cons(z, L)) + std::fabs(Lc) + rms(zc));
        auto merit = [&](const std::vector<double>& zz, double LL) {
            asm_.rhs(zz, LL, F);
            return std::max(max_norm(F), std::fabs(cons(zz, LL)) * 1e-3);
        };
        double corr_tol = std::max(1e-9, asm_.residual_floor(zc, Lc));
        double nrm = merit(zc, Lc);
        int it = 0;
        for (; it < 20; ++it) {
            asm_.rhs(zc, Lc, F);
            if (max_norm(F) < corr_tol && std::fabs(cons(zc, Lc)) < cons_scale)
                return std::pair{true, it};
            asm_.newton_matrix(zc, Lc, 0.0, J); // A = -dF/dz
            BlockTridiagLU lu(J);
            last_det = lu.det_sign();
            asm_.rhs_L_derivative(zc, Lc, FL);
            asm_.rhs(zc, Lc, F);
            double cL = 0;
            cons_grad(zc, c, cL);
            for (int i = 0; i < 2 * N; ++i) {
                b[i] = -FL[i];
                r[i] = F[i];
            }
            double dL = 0;
            if (!numerics::solve_bordered(lu, b, c, cL, r, -cons(zc, Lc), dz, dL))
                return std::pair{false, it};
            double lambda = 1.0;
            bool moved = false;
            for (int back = 0; back < 12; ++back) {
                std::vector<double> zn = zc;
                for (int i = 0; i < 2 * N; ++i) zn[i] += lambda * dz[i];
                double Ln = Lc + lambda * dL;
                double nn = merit(zn, Ln);
                if (std::isfinite(nn) && (nn < nrm || nn < corr_tol)) {
                    zc.swap(zn);
                    Lc = Ln;
                    nrm = nn;
                    moved = true;
                    break;
                }
                lambda *= 0.5;
            }
            if (!moved) return std::pair{false, it};
        }
        return std::pair{false, it};
    };

    auto record = [&](double dL_step) {
        asm_.rhs(z, L, F);
        branch.points.push_back(make_point(model, start.n, L, z, max_norm(F)));
        // fold: sign change of dL/ds (deduped; micro-steps can jitter signs)
        if (prev_dL != 0 && dL_step * prev_dL < 0) {
            std::size_t k = branch.points.size();
            double L0 = branch.points[k - 3].L, L1 = branch.points[k - 2].L,
                   L2 = branch.points[k - 1].L;
            double denom = L0 - 2 * L1 + L2;
            double L_fold = L1;
            if (std::fabs(denom) > 1e-300) {
                double sv = 0.5 * (L0 - L2) / denom;
                L_fold = L1 - 0.25 * (L0 - L2) * sv;
            }
            bool fresh = branch.folds.empty() ||
                         std::fabs(branch.folds.back().L - L_fold) > 1e-3 * (1.0 + L_fold);
            if (fresh) {
                branch.folds.push_back({L_fold, static_cast<int>(k - 2)});
                branch.points[k - 2].is_fold = true;
                branch.candidates.push_back(
                    {L_fold, static_cast<int>(k - 2), true, "dL/ds sign change (fold)"});
            }
        }
        prev_dL = dL_step;
    };

    int det_prev = 0;
    auto track_det = [&]() {
        if (det_prev != 0 && last_det != det_prev) {
            bool near_fold = !branch.folds.empty() &&
                             static_cast<int>(branch.points.size()) - 1 -
                                     branch.folds.back().point_index <=
                                 3;
            if (!near_fold)
                branch.candidates.push_back({L, static_cast<int>(branch.points.size() - 1), false,
                                             "Jacobian determinant sign change away from a fold"});
        }
        det_prev = last_det;
    };

    int since_stride = 0;
    int measure_steps_left = 0; // > 0 while in measure-pinned mode
    int measure_index = -1;     // 2n for mu, -2 for u0v0
    double dm = 0;

    while (static_cast<int>(branch.points.size()) < opts.max_points) {
        if (measure_steps_left == 0) {
            // arclength predictor/corrector
            std::vector<double> zp(2 * N);
            for (int i = 0; i < 2 * N; ++i) zp[i] = z[i] + ds * tz[i];
            double Lp = L + ds * tL;
            std::vector<double> zc = zp;
            double Lc = Lp;
            auto cons = [&](const std::vector<double>& zz, double LL) {
                double g = tL * (LL - Lp);
                for (int i = 0; i < 2 * N; ++i) g += wz * wz * tz[i] * (zz[i] - zp[i]);
                return g;
            };
            auto cons_grad = [&](const std::vector<double>&, std::vector<double>& cv, double& cL) {
                for (int i = 0; i < 2 * N; ++i) cv[i] = wz * wz * tz[i];
                cL = tL;
            };
            auto [ok, iters] = bordered_solve(zc, Lc, cons, cons_grad);
            if (!ok) {
                ds *= 0.4;
                if (ds >= opts.ds_min) continue;
                // arclength exhausted: switch to pinning the measure that is
                // still moving (mu for nucleation-type folds, u(0)v(0) for
                // replication-type), the analogue of the core B<->beta switch
                if (branch.points.size() < 3) break;
                const auto& p1 = branch.points[branch.points.size() - 1];
                const auto& p2 = branch.points[branch.points.size() - 2];
                double dmu = std::fabs(p1.measure_mu - p2.measure_mu) /
                             (1e-12 + std::fabs(p1.measure_mu));
                double duv = std::fabs(p1.measure_u0v0 - p2.measure_u0v0) /
                             (1e-12 + std::fabs(p1.measure_u0v0));
                measure_index = dmu >= duv ? 2 * start.n : -2;
                double m1 = dmu >= duv ? p1.measure_mu : p1.measure_u0v0;
                double m2 = dmu >= duv ? p2.measure_mu : p2.measure_u0v0;
                if (m1 == m2) {
                    branch.notes.push_back("arclength step underflow at L=" + std::to_string(L));
                    break;
                }
                // healthy step scale: the stall points are microscopically
                // spaced, so size dm from the measure itself
                dm = (m1 > m2 ? 1.0 : -1.0) * std::max(std::fabs(m1 - m2), 5e-3 * std::fabs(m1));
                measure_steps_left = 250;
                ds = opts.ds0; // for the return to arclength later
                continue;
            }
            double dL_step = Lc - L;
            std::vector<double> dz_step(2 * N);
            for (int i = 0; i < 2 * N; ++i) dz_step[i] = zc[i] - z[i];
            z = zc;
            L = Lc;
            record(dL_step);
            track_det();
            double tnorm2 = dL_step * dL_step;
            for (int i = 0; i < 2 * N; ++i) tnorm2 += wz * wz * dz_step[i] * dz_step[i];
            double tnorm = std::sqrt(tnorm2);
            if (tnorm > 0) {
                for (int i = 0; i < 2 * N; ++i) tz[i] = wz * wz * dz_step[i] / tnorm;
                tL = dL_step / tnorm;
            }
            wz = weight(z);
            ds = std::min(ds * (iters <= 2 ? 1.7 : iters <= 5 ? 1.3 : 1.0), opts.ds_max);
        } else {
            // measure-pinned step
            double m_now = measure_index >= 0 ? z[measure_index]
                                              : z[2 * (start.n / 2)] * z[2 * (start.n / 2) + 1];
            double m_target = m_now + dm;
            std::vector<double> zc = z;
            double Lc = L;
            auto cons = [&](const std::vector<double>& zz, double) {
                double m = measure_index >= 0 ? zz[measure_index]
                                              : zz[2 * (start.n / 2)] * zz[2 * (start.n / 2) + 1];
                return m - m_target;
            };
            auto cons_grad = [&](const std::vector<double>& zz, std::vector<double>& cv, double& cL) {
                std::fill(cv.begin(), cv.end(), 0.0);
                if (measure_index >= 0) {
                    cv[measure_index] = 1.0;
                } else {
                    int cidx = 2 * (start.n / 2);
                    cv[cidx] = zz[cidx + 1];
                    cv[cidx + 1] = zz[cidx];
                }
                cL = 0.0;
            };
            auto [ok, iters] = bordered_solve(zc, Lc, cons, cons_grad);
            --measure_steps_left;
            double m_new = measure_index >= 0 ? zc[measure_index]
                                              : zc[2 * (start.n / 2)] * zc[2 * (start.n / 2) + 1];
            if (!ok || std::fabs(m_new - m_now) < 0.1 * std::fabs(dm)) {
                dm *= 0.4;
                if (std::fabs(dm) < 1e-9 * (1.0 + std::fabs(m_now)) || measure_steps_left <= 0) {
                    branch.notes.push_back("measure-pinned continuation stalled at L=" +
                                           std::to_string(L));
                    break;
                }
                continue;
            }
            double dL_step = Lc - L;
            std::vector<double> dz_step(2 * N);
            for (int i = 0; i < 2 * N; ++i) dz_step[i] = zc[i] - z[i];
            z = zc;
            L = Lc;
            record(dL_step);
            track_det();
            if (iters <= 3) dm *= 1.4;
            // once past the fold and moving in L again, hand back to arclength
            bool past_fold = !branch.folds.empty() &&
                             static_cast<int>(branch.points.size()) - 1 -
                                     branch.folds.back().point_index >=
                                 4;
            if (past_fold && std::fabs(dL_step) > 1e-4) {
                double tnorm2 = dL_step * dL_step;
                for (int i = 0; i < 2 * N; ++i) tnorm2 += wz * wz * dz_step[i] * dz_step[i];
                double tnorm = std::sqrt(tnorm2);
                if (tnorm > 0) {
                    for (int i = 0; i < 2 * N; ++i) tz[i] = wz * wz * dz_step[i] / tnorm;
                    tL = dL_step / tnorm;
                }
                wz = weight(z);
                measure_steps_left = 0;
            }
        }
        ++since_stride;
        if (since_stride >= opts.stability_stride) {
            since_stride = 0;
            stability_at(branch.points.back());
        }
        if (L < opts.L_min || L > opts.L_max) break;
    }
    return branch;
}

std::vector<std::complex<double>> branch_stability(const SteadyState& state, int n_eigs) {
    rd::Assembly asm_(state.model, state.n);
    int N = asm_.N;
    std::vector<std::complex<double>> found;
    for (double sigma : {0.5, 0.02}) {
        BlockTridiag J(N);
        asm_.newton_matrix(state.z, state.L, sigma, J); // sigma*M - dF/dz
        BlockTridiagLU lu(J);
        // (dF/dz - sigma M)^{-1} M x = -(J)^{-1} M x
        auto apply = [&](const std::vector<double>& x, std::vector<double>& y) {
            y.resize(2 * N);
            for (int i = 0; i < 2 * N; ++i) y[i] = asm_.mass(i) * x[i];
            lu.solve(y);
            for (double& v : y) v = -v;
        };
        std::vector<numerics::RitzValue> ritz;
        try {
            ritz = numerics::shift_invert_arnoldi(apply, 2 * N, sigma, 70);
        } catch (const error&) {
            continue;
        }
        for (const auto& rv : ritz) {
            bool dup = false;
            for (const auto& l : found)
                if (std::abs(l - rv.lambda) < 1e-7 * (1.0 + std::abs(rv.lambda))) dup = true;
            if (!dup) found.push_back(rv.lambda);
        }
    }
    if (found.empty()) throw eig_solver_failure("no converged eigenvalues at L=" + std::to_string(state.L));
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.real() > b.real(); });
    if (static_cast<int>(found.size()) > n_eigs) found.resize(n_eigs);
    return found;
}

Stability stability_verdict(const std::vector<std::complex<double>>& eigs, double epsilon,
                            double* lambda_max_re) {
    double lam = -1e300;
    bool any = false;
    for (const auto& l : eigs) {
        if (std::abs(l) < 1e-4 * epsilon) continue; // near-zero drift modes flagged separately
        lam = std::max(lam, l.real());
        any = true;
    }
    if (lambda_max_re) *lambda_max_re = any ? lam : 0.0;
    if (!any) return Stability::Unknown;
    if (lam < -1e-6) return Stability::Stable;
    if (lam > 1e-6) return Stability::Unstable;
    return Stability::Unknown;
}

Atlas multi_branch_atlas(const ModelSpec& model, double L_lo, double L_hi, int max_half_spikes,
                         int n, ContinueOptions opts) {
    Atlas atlas;
    atlas.model = model;
    opts.L_min = L_lo;
    opts.L_max = L_hi;
    auto regime = outer::classify(model);

    // reference one-spike critical length for seeding start points
    double L1 = 0;
    try {
        if (regime == models::Regime::Replication)
            L1 = outer::replication_threshold(model, 1).L_crit;
        else if (regime == models::Regime::Nucleation)
            L1 = outer::nucleation_threshold(model, 1).L_crit;
    } catch (const error&) {
    }

    atlas.branches.resize(max_half_spikes);
    std::vector<std::string> notes(max_half_spikes);
    parallel_for(max_half_spikes, [&](std::ptrdiff_t idx) {
        int m = static_cast<int>(idx) + 1;
        bool boundary_phase = (m % 2 == 1) || (m >= 4 && regime == models::Regime::Nucleation);
        std::string id = "m" + std::to_string(m) + (boundary_phase ? "_boundary" : "_interior");
        try {
            double L_start = L1 > 0 ? 0.75 * (m / 2.0) * L1 : std::sqrt(L_lo * L_hi);
            L_start = std::clamp(L_start, L_lo * 1.02, L_hi * 0.98);
            SteadyState st;
            bool seeded = false;
            for (int attempt = 0; attempt < 7 && !seeded; ++attempt) {
                try {
                    st = steady_solve_pattern(model, L_start, n, m, boundary_phase);
                    seeded = true;
                } catch (const error&) {
                    L_start *= 0.85;
                    if (L_start < L_lo) break;
                }
            }
            if (!seeded) throw error("SeedFailure", "no converged start state in range");
            auto up = continue_in_L(model, st, +1, opts);
            auto down = continue_in_L(model, st, -1, opts);
            // merge: down walk reversed, then the up walk (skip duplicate start)
            SteadyBranch merged;
            merged.branch_id = id;
            merged.half_spikes = m;
            for (auto it = down.points.rbegin(); it != down.points.rend(); ++it)
                merged.points.push_back(*it);
            int offset = static_cast<int>(merged.points.size()) - 1;
            for (std::size_t i = 1; i < up.points.size(); ++i) merged.points.push_back(up.points[i]);
            for (auto f : down.folds)
                merged.folds.push_back({f.L, offset - f.point_index});
            for (auto f : up.folds) merged.folds.push_back({f.L, offset + f.point_index});
            for (auto cdd : down.candidates) {
                cdd.point_index = offset - cdd.point_index;
                merged.candidates.push_back(cdd);
            }
            for (auto cdd : up.candidates) {
                cdd.point_index = offset + cdd.point_index;
                merged.candidates.push_back(cdd);
            }
            merged.notes = down.notes;
            merged.notes.insert(merged.notes.end(), up.notes.begin(), up.notes.end());
            atlas.branches[idx] = std::move(merged);
        } catch (const std::exception& e) {
            notes[idx] = id + ": " + e.what();
            atlas.branches[idx].branch_id = id;
            atlas.branches[idx].half_spikes = m;
        }
    });
    for (auto& s : notes)
        if (!s.empty()) atlas.notes.push_back(s);
    return atlas;
}

namespace {
double fold_at_resolution(const ModelSpec& model, int half_spikes, bool boundary_phase, int n,
                          double L_hint) {
    auto start = steady_solve_pattern(model, 0.8 * L_hint, n, half_spikes, boundary_phase);
    ContinueOptions opts;
    opts.L_min = 0.5 * L_hint;
    opts.L_max = 1.6 * L_hint;
    opts.compute_stability = false;
    auto br = continue_in_L(model, start, +1, opts);
    if (br.folds.empty())
        throw error("NoFold", "no fold found near L=" + std::to_string(L_hint) +
                                  " at n=" + std::to_string(n));
    return br.folds[0].L;
}
} // namespace

FoldEstimate fold_richardson(const ModelSpec& model, int half_spikes, bool boundary_phase, int n,
                             double L_hint) {
    FoldEstimate fe;
    fe.L_half = fold_at_resolution(model, half_spikes, boundary_phase, n / 2, L_hint);
    fe.L_n = fold_at_resolution(model, half_spikes, boundary_phase, n, L_hint);
    fe.L_extrapolated = fe.L_n + (fe.L_n - fe.L_half) / 3.0; // second-order scheme
    return fe;
}

Overlay overlay(const pde::SimTrajectory& traj, const Atlas& atlas) {
    Overlay ov;
    for (const auto& row : traj.l2_series) {
        Overlay::Row r;
        r.source = "trajectory";
        r.L = row[1];
        r.l2norm_v = row[2];
        for (const auto& e : traj.events.entries)
            if (std::fabs(e.L - r.L) < 0.5 * traj.config.track_dL) r.event = pde::to_string(e.kind);
        ov.rows.push_back(std::move(r));
    }
    for (const auto& br : atlas.branches)
        for (const auto& p : br.points) {
            Overlay::Row r;
            r.source = br.branch_id;
            r.L = p.L;
            r.l2norm_v = p.l2norm_v;
            ov.rows.push_back(std::move(r));
        }
    return ov;
}

void save_branch_csv(const SteadyBranch& branch, const std::string& path) {
    io::CsvWriter csv(path);
    csv.header("branch_id,L,measure_mu,measure_u0v0,l2norm_v,stability,is_fold");
    for (const auto& p : branch.points) {
        std::string st = p.stability == Stability::Stable     ? "stable"
                         : p.stability == Stability::Unstable ? "unstable"
                                                              : "unknown";
        csv.raw(branch.branch_id + "," + io::format_double(p.L) + "," +
                io::format_double(p.measure_mu) + "," + io::format_double(p.measure_u0v0) + "," +
                io::format_double(p.l2norm_v) + "," + st + "," + (p.is_fold ? "1" : "0"));
    }
}

void save_atlas(const Atlas& atlas, const std::string& dir) {
    io::ensure_directory(dir);
    nlohmann::json manifest;
    manifest["model"] = atlas.model.to_json();
    manifest["notes"] = atlas.notes;
    nlohmann::json branches = nlohmann::json::array();
    for (const auto& br : atlas.branches) {
        if (!br.points.empty()) save_branch_csv(br, dir + "/" + br.branch_id + ".csv");
        nlohmann::json folds = nlohmann::json::array();
        for (const auto& f : br.folds) folds.push_back({{"L", f.L}, {"point_index", f.point_index}});
        nlohmann::json cands = nlohmann::json::array();
        for (const auto& cd : br.candidates)
            cands.push_back({{"L", cd.L},
                             {"point_index", cd.point_index},
                             {"at_fold", cd.at_fold},
                             {"diagnostics", cd.diagnostics}});
        branches.push_back({{"id", br.branch_id},
                            {"half_spikes", br.half_spikes},
                            {"points", br.points.size()},
                            {"folds", folds},
                            {"candidates", cands},
                            {"notes", br.notes}});
    }
    manifest["branches"] = branches;
    io::write_json(manifest, dir + "/atlas.json");
}

void save_overlay_csv(const Overlay& ov, const std::string& path) {
    io::CsvWriter csv(path);
    csv.header("source,L,l2norm_v,event");
    for (const auto& r : ov.rows)
        csv.raw(r.source + "," + io::format_double(r.L) + "," + io::format_double(r.l2norm_v) +
                "," + r.event);
}

} // namespace spikelab::continuation
