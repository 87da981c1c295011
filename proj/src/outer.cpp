#include "spikelab/outer.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/numerics/quadrature.hpp"
#include "spikelab/numerics/roots.hpp"
#include "spikelab/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>

namespace spikelab::outer {

namespace {

double sqrt_clamped(double x) { return std::sqrt(std::max(x, 0.0)); }

// first-integral prefactor in B^2 = pref (G(mu) - G(v0))
double matching_prefactor(const ModelSpec& model) {
    switch (model.kind) {
        case ModelKind::Schnakenberg: return 2.0;
        case ModelKind::Brusselator: {
            double f = model.brusselator().f;
            return 2.0 / (f * f);
        }
        case ModelKind::GM: break;
    }
    throw config_error("matching prefactor is defined for Schnakenberg/Brusselator only");
}

struct GmGeometry {
    double kappa;
    double gamma(double H0L) const { return 0.5 * (1.0 - std::sqrt(1.0 - 4.0 * kappa / H0L)); }
    double A0(double H0L) const {
        return std::max(gamma(H0L) * H0L, kappa * (1.0 + 1e-12)); // log-singularity clamp
    }
    double H_min() const { return 4.0 * kappa; } // real gamma requires H0L > 4 kappa
};

} // namespace

double chi(const OuterReduction& red, double mu, double v0plus, double abs_tol) {
    if (!(v0plus > red.wellposed_lo() * (1.0 - 1e-14)) || !(mu > v0plus) ||
        !(mu <= red.wellposed_hi() * (1.0 + 1e-14)))
        throw spikelab::domain_error("chi needs wellposed_lo < v0plus < mu <= mu_max");
    double boundary = -2.0 * sqrt_clamped(red.Gdiff(mu, v0plus)) / red.R(v0plus);
    auto integrand = [&](double xi) {
        double R = red.R(xi);
        return sqrt_clamped(red.Gdiff(mu, xi)) * red.Rprime(xi) / (R * R);
    };
    auto q = numerics::integrate(integrand, v0plus, mu, abs_tol);
    return boundary + 2.0 * q.value;
}

double chi(const ModelSpec& model, double mu, double v0plus) {
    return chi(models::outer_reduction(model), mu, v0plus);
}

double chi_partial(const OuterReduction& red, double w, double mu, double v0plus, double abs_tol) {
    if (!(w >= v0plus) || !(w <= mu)) throw spikelab::domain_error("chi_partial needs v0plus <= w <= mu");
    if (w == v0plus) return 0.0;
    double bnd = 2.0 * sqrt_clamped(red.Gdiff(mu, w)) / red.R(w) -
                 2.0 * sqrt_clamped(red.Gdiff(mu, v0plus)) / red.R(v0plus);
    auto integrand = [&](double xi) {
        double R = red.R(xi);
        return sqrt_clamped(red.Gdiff(mu, xi)) * red.Rprime(xi) / (R * R);
    };
    auto q = numerics::integrate(integrand, v0plus, w, abs_tol);
    return bnd + 2.0 * q.value;
}

// ---------------------------------------------------------------------------
// cached core-problem tables
// ---------------------------------------------------------------------------

std::shared_ptr<const core::CoreTables> core_tables(ModelKind kind, double f) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::shared_ptr<const core::CoreTables>> cache;
    std::pair<int, double> key{static_cast<int>(kind), f};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    std::optional<double> ff = kind == ModelKind::Brusselator ? std::optional<double>(f) : std::nullopt;
    core::StepControl st;
    st.stop_after_fold = true;
    auto branch = core::continue_core_branch(kind, ff, {0, 0}, st);
    auto tables = std::make_shared<core::CoreTables>(core::primary_tables(branch));
    std::lock_guard<std::mutex> lock(mu);
    cache[key] = tables;
    return tables;
}

const std::vector<core::BcEntry>& brusselator_fold_table() {
    static std::once_flag once;
    static std::vector<core::BcEntry> table;
    std::call_once(once, [] {
        std::vector<double> fg;
        for (double f = 0.55; f < 0.96; f += 0.05) fg.push_back(f);
        table = core::bc_table(fg);
    });
    return table;
}

models::RegimeThresholds computed_thresholds() {
    models::RegimeThresholds th;
    th.Bc_schnakenberg = core_tables(ModelKind::Schnakenberg)->Bc;
    th.fc_brusselator = critical_f();
    return th;
}

Regime classify(const ModelSpec& model) {
    if (model.kind == ModelKind::GM) return models::classify_regime(model);
    return models::classify_regime(model, computed_thresholds());
}

// ---------------------------------------------------------------------------
// quasi-equilibrium solves
// ---------------------------------------------------------------------------

namespace {

struct SbContext {
    ModelSpec model;
    OuterReduction red;
    std::shared_ptr<const core::CoreTables> tables;
    double pref;
    V0Mode mode;

    explicit SbContext(const ModelSpec& m, V0Mode v0mode)
        : model(m), red(models::outer_reduction(m)),
          tables(core_tables(m.kind, m.kind == ModelKind::Brusselator ? m.brusselator().f : 0.0)),
          pref(matching_prefactor(m)), mode(v0mode) {}

    double base() const { return red.wellposed_lo(); }

    double v0(double B) const {
        double a = base();
        if (mode == V0Mode::LeadingOrder) return a * (1.0 + 1e-12);
        double fc = model.kind == ModelKind::Brusselator ? model.brusselator().f : 1.0;
        double C = tables->C(std::min(B, tables->Bc));
        double v = a + a * a * C * fc * model.eps_over_sqrtD();
        // the expansion is meaningless once the correction stops being small;
        // the cap only tames bracket endpoints at B -> 0
        return std::min(v, a + 0.3 * (red.wellposed_hi() - a));
    }

    // mu with G(mu) - G(v0) = B^2/pref, or nullopt beyond mu_hi
    std::optional<double> mu_of_B(double B, double mu_hi) const {
        double v0p = v0(B);
        double target = B * B / pref;
        if (target >= red.Gdiff(mu_hi, v0p)) return std::nullopt;
        if (target <= 0) return v0p;
        return numerics::brent([&](double m) { return red.Gdiff(m, v0p) - target; }, v0p, mu_hi,
                               1e-15);
    }

    // self-consistent B at a given mu (v0 depends on B through C)
    double B_of_mu(double mu) const {
        double B = 0.5;
        for (int it = 0; it < 60; ++it) {
            double v0p = v0(B);
            double Bn = v0p < mu ? sqrt_clamped(pref * red.Gdiff(mu, v0p)) : 0.0;
            if (std::fabs(Bn - B) < 1e-14 * (1.0 + Bn)) return Bn;
            B = Bn;
        }
        return B;
    }
};

// largest admissible mu: mu_max, or just below v_infty at the double-precision
// resolution floor
double effective_mu_hi(const OuterReduction& red) {
    if (!red.v_infty()) return red.mu_max();
    double vinf = *red.v_infty();
    double span = vinf - red.wellposed_lo();
    return vinf - span * 1e-13;
}

// root of the increasing residual phi(mu) on (mu_lo, mu_hi]. When a
// homogeneous state v_infty caps the range, chi is nearly vertical there and
// mu is resolved in s = log(v_infty - mu) instead, where phi is tame.
double mu_root(const OuterReduction& red, const std::function<double(double)>& phi, double mu_lo,
               double mu_hi) {
    if (!red.v_infty()) return numerics::brent(phi, mu_lo, mu_hi, 1e-15);
    double vinf = *red.v_infty();
    double span = vinf - red.wellposed_lo();
    double mu_easy = vinf - 0.25 * span;
    if (mu_easy > mu_lo && phi(mu_easy) >= 0) return numerics::brent(phi, mu_lo, mu_easy, 1e-15);
    // past mu_easy chi blows up; a stalled quadrature there only means "very
    // large", which is all the bracket needs
    auto phi_safe = [&](double mu) {
        try {
            return phi(mu);
        } catch (const quadrature_failure&) {
            return 1e12;
        }
    };
    if (phi_safe(mu_hi) < 0)
        throw error("FpLimit", "mu cannot approach v_infty closely enough in double precision "
                               "for this D_L; the quasi-equilibrium exists but is unresolvable");
    double s_lo = std::log(vinf - mu_hi), s_hi = std::log(vinf - std::max(mu_easy, mu_lo));
    auto phis = [&](double s) { return phi_safe(vinf - std::exp(s)); };
    double s = numerics::brent(phis, s_lo, s_hi, 1e-12);
    // mu quantizes at ulp(v_infty); when the residual staircase floor sits
    // above tolerance the solution is unresolvable in double precision
    double res = std::fabs(phis(s));
    if (res > 1e-8 && phis(s + 3e-7) == phis(s - 3e-7))
        throw error("FpLimit", "mu - v_infty below double resolution for this D_L; deep in the "
                               "weak-interaction direction the outer solve cannot be represented");
    return vinf - std::exp(s);
}

OuterSolve solve_sb(const ModelSpec& model, double ell, double L, V0Mode v0mode) {
    SbContext ctx(model, v0mode);
    double D_L = model.bigD / (L * L);
    double target = std::sqrt(2.0 / D_L) * ell;

    double mu_hi = effective_mu_hi(ctx.red);

    // replication constraint: the core fold binds when chi at mu(B_c) is short
    double Bc = ctx.tables->Bc;
    if (auto mu_c = ctx.mu_of_B(Bc, mu_hi)) {
        if (*mu_c > ctx.v0(Bc) && chi(ctx.red, *mu_c, ctx.v0(Bc)) < target)
            throw no_quasi_equilibrium("B_c", "quasi-equilibrium requires B > B_c (replication regime beyond threshold)");
    }
    // nested residual in mu: chi is steep near v_infty where B(mu) flattens,
    // so mu is the well-conditioned outer unknown
    auto phi = [&](double mu) {
        double B = ctx.B_of_mu(mu);
        double v0p = ctx.v0(B);
        if (!(mu > v0p)) return -target;
        return chi(ctx.red, mu, v0p) - target;
    };
    // nucleation constraint: chi at mu_max must cover the target
    if (!ctx.red.v_infty() && phi(mu_hi) < 0)
        throw no_quasi_equilibrium("mu_max", "chi(mu_max) < sqrt(2/D_L) ell (nucleation regime beyond threshold)");
    double mu_lo = ctx.base() * (1.0 + 1e-10);
    double mu_star = mu_root(ctx.red, phi, mu_lo, mu_hi);
    double B_star = ctx.B_of_mu(mu_star);

    // polish the 2-unknown matching system with damped Newton
    auto F = [&](double B, double mu) {
        double v0p = ctx.v0(B);
        double f1 = chi(ctx.red, mu, v0p) - target;
        double f2 = B * B - ctx.pref * ctx.red.Gdiff(mu, v0p);
        return std::pair<double, double>{f1, f2};
    };
    auto admissible = [&](double B, double mu) {
        return B > 0 && mu > ctx.v0(B) && mu <= mu_hi * (1.0 + 1e-12);
    };
    auto [b1, b2] = F(B_star, mu_star);
    double brent_res = std::max(std::fabs(b1), std::fabs(b2));
    auto polish = numerics::newton2(F, B_star, mu_star, 3e-10, 40, 1e-7, admissible);

    OuterSolve out;
    bool use_polish = polish.converged && polish.residual < brent_res;
    out.B = use_polish ? polish.x : B_star;
    out.mu = use_polish ? polish.y : mu_star;
    out.v0plus = ctx.v0(out.B);
    out.ell = ell;
    out.D_L = D_L;
    out.residual = use_polish ? polish.residual : brent_res;
    out.converged = out.residual < 1e-8;
    double cap = ctx.base() + 0.3 * (ctx.red.wellposed_hi() - ctx.base());
    if (out.v0plus >= cap * (1.0 - 1e-12))
        out.regime_hit = "v0_correction_saturated"; // O(eps) correction left its validity range
    if (!out.converged && ctx.red.v_infty()) {
        // mu is stored at ulp(v_infty) resolution; when the residual sits at
        // that quantization floor the solution itself is as accurate as
        // doubles permit
        double vinf = *ctx.red.v_infty();
        double delta = vinf - out.mu;
        double ulp = std::nextafter(vinf, 1e300) - vinf;
        double slope_scale = std::sqrt(2.0 * ctx.red.g(vinf) / ctx.red.Rprime(vinf));
        double quantum = slope_scale * ulp / std::max(delta, ulp);
        if (out.residual <= 5.0 * quantum) {
            out.converged = true;
            out.regime_hit = "mu_resolution_floor";
        }
    }
    if (!out.converged)
        throw newton_diverged("outer matching system stalled at residual " + std::to_string(out.residual));
    return out;
}

struct GmContext {
    double kappa, eps_s; // eps/sqrt(D)
    OuterReduction red;
    GmGeometry geom;

    explicit GmContext(const ModelSpec& m)
        : kappa(m.gm().kappa), eps_s(m.eps_over_sqrtD()), red(models::outer_reduction(m)),
          geom{m.gm().kappa} {
        if (!(kappa > 0)) throw config_error("GM outer problem needs kappa > 0");
    }

    // residual of the H0L matching condition at fixed mu
    double F1(double H, double mu) const {
        double g = geom.gamma(H);
        double A0 = geom.A0(H); // clamped above kappa
        if (!(A0 < mu)) return 1e9; // outside the domain; treated as overshoot
        double lhs = 3.0 * H * H / std::sqrt(2.0) * eps_s * std::sqrt(1.0 - 2.0 * g);
        double rhs = sqrt_clamped(red.Gdiff(mu, A0));
        return lhs - rhs;
    }

    double H_estimate(double ell, double D_L) const {
        // the small-kappa level H0 ~ sqrt(D_L)/3 tanh(ell/sqrt(D_L)) divided by eps_L
        return std::tanh(ell / std::sqrt(D_L)) / (3.0 * eps_s);
    }

    // Admissibility floor in H: A0(H) decreases through mu at this level.
    double H_level(double mu) const {
        double H_lo = geom.H_min() * (1.0 + 1e-10);
        if (!(geom.A0(H_lo) > mu)) return H_lo;
        return numerics::brent([&](double H) { return geom.A0(H) - mu; }, H_lo, 1e9, 1e-14) *
               (1.0 + 1e-12);
    }

    // The matching condition generally has two H roots above H_level: F1 is
    // positive at the admissibility edge, dips through a valley, and grows
    // like H^2 eventually. The outer (large-H) root carries the quasi-steady
    // spike, H0 ~ sqrt(D_L)/3; the inner one continues the family toward
    // large D_L where the outer root ceases. A log-spaced scan brackets them.
    std::vector<std::pair<double, double>> F1_brackets(double mu, double H_guess) const {
        double lo = H_level(mu);
        double hi = std::max({H_guess * 64.0, lo * 1e4, geom.H_min() * 1e4});
        const int n = 240;
        std::vector<std::pair<double, double>> out;
        double prev_H = lo, prev_F = F1(lo, mu);
        for (int i = 1; i <= n; ++i) {
            double H = lo * std::pow(hi / lo, double(i) / n);
            double F = F1(H, mu);
            if (prev_F * F < 0) out.push_back({prev_H, H});
            prev_H = H;
            prev_F = F;
        }
        return out;
    }

    double H_of_mu(double mu, double H_guess) const {
        auto br = F1_brackets(mu, H_guess);
        if (br.empty()) throw bracket_failure("GM matching bracket failed at mu=" + std::to_string(mu));
        auto [lo, hi] = br.back(); // outer root
        return numerics::brent([&](double H) { return F1(H, mu); }, lo, hi, 1e-13);
    }

    double H_of_mu_inner(double mu) const {
        auto br = F1_brackets(mu, 1.0 / eps_s);
        if (br.empty()) throw bracket_failure("GM inner-root bracket failed at mu=" + std::to_string(mu));
        auto [lo, hi] = br.front();
        return numerics::brent([&](double H) { return F1(H, mu); }, lo, hi, 1e-13);
    }
};

OuterSolve solve_gm(const ModelSpec& model, double ell, double L) {
    GmContext ctx(model);
    double D_L = model.bigD / (L * L);
    double target = std::sqrt(2.0 / D_L) * ell;
    double H_guess = ctx.H_estimate(ell, D_L);

    bool inner_branch = false;
    auto H_at = [&](double mu) {
        return inner_branch ? ctx.H_of_mu_inner(mu) : ctx.H_of_mu(mu, H_guess);
    };
    auto chi_at = [&](double mu) { return chi(ctx.red, mu, ctx.geom.A0(H_at(mu))); };
    double mu_hi = effective_mu_hi(ctx.red);
    auto F2 = [&](double mu) { return chi_at(mu) - target; };
    if (!ctx.red.v_infty() && F2(mu_hi) < 0)
        throw no_quasi_equilibrium("mu_max", "chi(2 kappa) < sqrt(2/D_L) ell (GM nucleation beyond threshold)");

    // walk the lower bracket upward until the inner solve works and F2 < 0;
    // the admissibility edge is refined by bisection so a narrow F2 < 0
    // window next to it is not stepped over
    auto find_bracket = [&](double& lo, double& flo) {
        double bad = ctx.kappa;
        lo = ctx.kappa * (1.0 + 1e-7);
        bool valid = false;
        for (int it = 0; it < 60 && !valid; ++it) {
            try {
                flo = F2(lo);
                valid = true;
            } catch (const error&) {
                bad = lo;
                lo = ctx.kappa + (lo - ctx.kappa) * 3.0;
                if (lo >= mu_hi) return false;
            }
        }
        if (!valid) return false;
        for (int it = 0; it < 80 && flo >= 0; ++it) {
            double mid = 0.5 * (bad + lo);
            if (!(mid > bad && mid < lo)) break;
            try {
                double fm = F2(mid);
                lo = mid;
                flo = fm;
            } catch (const error&) {
                bad = mid;
            }
        }
        return true;
    };
    auto F = [&](double H, double mu) {
        double f1 = ctx.F1(H, mu);
        double f2 = chi(ctx.red, mu, ctx.geom.A0(H)) - target;
        return std::pair<double, double>{f1, f2};
    };
    auto admissible = [&](double H, double mu) {
        return H > ctx.geom.H_min() && ctx.geom.A0(H) < mu && mu <= mu_hi * (1.0 + 1e-12);
    };

    double lo = 0, flo = 0;
    if (!find_bracket(lo, flo)) throw bracket_failure("GM outer solve found no admissible mu bracket");
    double mu_star = 0, H_star = 0;
    if (flo < 0) {
        mu_star = mu_root(ctx.red, F2, lo, mu_hi);
        H_star = H_at(mu_star);
    } else {
        // no negative side left of the admissibility edge; Newton from the
        // corner still reaches the joint solution when it exists nearby
        bool corner_ok = false;
        numerics::Newton2Result nr;
        try {
            double Hc = H_at(lo);
            nr = numerics::newton2(F, Hc, lo, 3e-10, 60, 1e-7, admissible);
            corner_ok = nr.converged;
        } catch (const error&) {
        }
        if (corner_ok) {
            H_star = nr.x;
            mu_star = nr.y;
        } else {
            // the solution family continues on the inner matching root
            inner_branch = true;
            if (!find_bracket(lo, flo) || flo >= 0)
                throw bracket_failure("GM outer solve: no bracket on either matching root");
            mu_star = mu_root(ctx.red, F2, lo, mu_hi);
            H_star = H_at(mu_star);
        }
    }
    auto [b1, b2] = F(H_star, mu_star);
    double brent_res = std::max(std::fabs(b1), std::fabs(b2));
    auto polish = numerics::newton2(F, H_star, mu_star, 3e-10, 40, 1e-7, admissible);

    OuterSolve out;
    bool use_polish = polish.converged && polish.residual < brent_res;
    out.H0L = use_polish ? polish.x : H_star;
    out.mu = use_polish ? polish.y : mu_star;
    out.v0plus = ctx.geom.A0(out.H0L);
    out.ell = ell;
    out.D_L = D_L;
    out.residual = use_polish ? polish.residual : brent_res;
    out.converged = out.residual < 1e-8;
    if (inner_branch) out.regime_hit = "inner_matching_root";
    if (!out.converged)
        throw newton_diverged("GM outer matching stalled at residual " + std::to_string(out.residual));
    return out;
}

} // namespace

OuterSolve solve_quasi_equilibrium_ell(const ModelSpec& model, double ell, double L, V0Mode v0mode) {
    if (!(ell > 0) || !(L > 0)) throw config_error("need ell > 0 and L > 0");
    model.validate();
    if (model.kind == ModelKind::GM) return solve_gm(model, ell, L);
    return solve_sb(model, ell, L, v0mode);
}

OuterSolve solve_quasi_equilibrium(const ModelSpec& model, int K, double L, V0Mode v0mode) {
    if (K < 1) throw config_error("K must be >= 1");
    return solve_quasi_equilibrium_ell(model, 1.0 / K, L, v0mode);
}

// ---------------------------------------------------------------------------
// thresholds
// ---------------------------------------------------------------------------

ThresholdResult replication_threshold(const ModelSpec& model, int K, V0Mode v0mode) {
    if (K < 1) throw config_error("K must be >= 1");
    if (model.kind == ModelKind::GM)
        throw regime_mismatch("spike self-replication does not occur for the GM model");
    SbContext ctx(model, v0mode);
    if (ctx.red.v_infty())
        throw regime_mismatch("homogeneous state present: no spike-generating instability");
    double Bc = ctx.tables->Bc;
    double span = Bc * Bc / ctx.pref;
    double cap = ctx.red.Gdiff(ctx.red.mu_max(), ctx.v0(Bc));
    if (cap < span * (1.0 - 1e-9))
        throw regime_mismatch("solved mu >= mu_max at B = B_c: nucleation occurs first");
    auto mu_opt = ctx.mu_of_B(Bc, ctx.red.mu_max());
    double mu = mu_opt ? *mu_opt : ctx.red.mu_max();
    double x = chi(ctx.red, mu, ctx.v0(Bc));
    ThresholdResult t;
    t.K = K;
    t.kind = Regime::Replication;
    t.mu_at_crit = mu;
    t.B_at_crit = Bc;
    t.L_crit = std::sqrt(model.bigD / 2.0) * K * x;
    t.D_L_crit = 2.0 / (K * K * x * x);
    return t;
}

ThresholdResult nucleation_threshold(const ModelSpec& model, int K, V0Mode v0mode) {
    if (K < 1) throw config_error("K must be >= 1");
    {
        auto red = models::outer_reduction(model);
        if (red.v_infty())
            throw regime_mismatch("homogeneous state present: no spike-generating instability");
    }
    ThresholdResult t;
    t.K = K;
    t.kind = Regime::Nucleation;
    if (model.kind == ModelKind::GM) {
        GmContext ctx(model);
        double mu_max = ctx.red.mu_max(); // 2 kappa
        // H estimate at the threshold: tanh factor ~ 1
        double H = ctx.H_of_mu(mu_max, 1.0 / (3.0 * ctx.eps_s));
        double x = chi(ctx.red, mu_max, ctx.geom.A0(H));
        t.mu_at_crit = mu_max;
        t.H0L_at_crit = H;
        t.L_crit = std::sqrt(model.bigD / 2.0) * K * x;
        t.D_L_crit = 2.0 / (K * K * x * x);
        return t;
    }
    SbContext ctx(model, v0mode);
    double mu_max = ctx.red.mu_max();
    double B = ctx.B_of_mu(mu_max);
    if (B > ctx.tables->Bc * (1.0 + 1e-9))
        throw regime_mismatch("B(mu_max) > B_c: replication occurs first");
    double x = chi(ctx.red, mu_max, ctx.v0(B));
    t.mu_at_crit = mu_max;
    t.B_at_crit = B;
    t.L_crit = std::sqrt(model.bigD / 2.0) * K * x;
    t.D_L_crit = 2.0 / (K * K * x * x);
    return t;
}

double critical_a(double b, double eps_over_sqrtD, CriticalAMode mode) {
    if (!(b > 0)) throw config_error("critical_a needs b > 0");
    auto tables = core_tables(ModelKind::Schnakenberg);
    double Bc = tables->Bc;
    if (mode == CriticalAMode::ClosedForm) return models::critical_a_closed_form(b, Bc);
    double Csc = tables->C_at_Bc;
    auto q = [&](double a) {
        OuterReduction red(ModelKind::Schnakenberg, a, b);
        double v0 = a + a * a * Csc * eps_over_sqrtD;
        return Bc * Bc / 2.0 - red.Gdiff(2.0 * a, v0);
    };
    return numerics::brent_scan(q, 0.02 * b, 0.95 * b, 128, 1e-13);
}

double critical_f(const std::vector<core::BcEntry>* table) {
    const auto& tab = table ? *table : brusselator_fold_table();
    std::vector<double> fs, Bcs;
    for (const auto& e : tab) {
        fs.push_back(e.f);
        Bcs.push_back(e.Bc);
    }
    numerics::Pchip Bc_of_f(fs, Bcs);
    auto q = [&](double f) {
        double Bc = Bc_of_f(f);
        return Bc * Bc * f * f / 2.0 - (-0.75 + f + (1.0 - f) * std::log(2.0));
    };
    return numerics::brent_scan(q, std::max(0.5001, fs.front()), std::min(0.9999, fs.back()), 64, 1e-12);
}

ThresholdResult small_param_threshold(const ModelSpec& model, int K) {
    if (K < 1) throw config_error("K must be >= 1");
    ThresholdResult t;
    t.K = K;
    t.kind = Regime::Replication;
    t.method = ThresholdResult::Method::SmallParam;
    if (model.kind == ModelKind::Schnakenberg) {
        double a = model.schnakenberg().a, b = model.schnakenberg().b;
        double Bc = core_tables(ModelKind::Schnakenberg)->Bc;
        double arg = a * Bc / b;
        if (!(arg < 1.0))
            throw prefactor_out_of_range("a B_c / b >= 1: small-a replication form undefined");
        double at = std::atanh(arg);
        t.B_at_crit = Bc;
        t.L_crit = std::sqrt(model.bigD) * K / a * at;
        t.D_L_crit = a * a / (K * K * at * at);
        return t;
    }
    if (model.kind == ModelKind::Brusselator) {
        double a = model.brusselator().a, f = model.brusselator().f;
        double Bc = core_tables(ModelKind::Brusselator, f)->Bc;
        double arg = Bc * std::sqrt(1.0 - f);
        if (!(arg < 1.0))
            throw prefactor_out_of_range("B_c sqrt(1-f) >= 1: small-a replication form undefined");
        double at = std::atanh(arg);
        t.B_at_crit = Bc;
        t.L_crit = std::sqrt(model.bigD) * K * at / (a * std::sqrt(1.0 - f));
        t.D_L_crit = model.bigD / (t.L_crit * t.L_crit);
        return t;
    }
    throw config_error("small_param_threshold covers Schnakenberg/Brusselator; use small_param_h0 for GM");
}

GmH0Estimate small_param_h0(const ModelSpec& model, int K, double L) {
    if (model.kind != ModelKind::GM) throw config_error("small_param_h0 is a GM form");
    if (K < 1 || !(L > 0)) throw config_error("need K >= 1 and L > 0");
    double ell = 1.0 / K;
    double D_L = model.bigD / (L * L);
    GmH0Estimate e;
    e.H0 = std::sqrt(D_L) / 3.0 * std::tanh(ell / std::sqrt(D_L));
    double eps_L = model.epsilon / L;
    e.H0L = e.H0 / eps_L; // = sqrt(D)/(3 eps) tanh(ell/sqrt(D_L))
    return e;
}

double F_s(double z) {
    if (!(z > 1.0 && z < 2.0 + 1e-12)) throw spikelab::domain_error("F_s needs 1 < z <= 2");
    return std::sqrt(2.0) * sqrt_clamped(-1.0 + 1.0 / z + std::log(z));
}

double F_b(double f) {
    if (!(f > 0.0 && f < 0.5)) throw spikelab::domain_error("F_b needs 0 < f < 1/2");
    return std::sqrt(2.0) * std::sqrt((1.0 - f) / (f * f) * (-f - std::log1p(-f)));
}

NorepBound norep_bound(const ModelSpec& model) {
    NorepBound nb;
    if (model.kind == ModelKind::Schnakenberg) {
        double a = model.schnakenberg().a, b = model.schnakenberg().b;
        if (!(b < a)) throw regime_mismatch("Schnakenberg no-replication bound needs b < a");
        nb.B_max = std::sqrt(2.0 * std::log(2.0) - 1.0);
        nb.Bc_reference = core_tables(ModelKind::Schnakenberg)->Bc;
        nb.no_replication = nb.B_max < nb.Bc_reference;
        return nb;
    }
    if (model.kind == ModelKind::Brusselator) {
        double f = model.brusselator().f;
        if (!(f < 0.5)) throw regime_mismatch("Brusselator no-replication bound needs f < 1/2");
        nb.B_max = 1.0; // sup of F_b as f -> 0+
        nb.Bc_reference = core_tables(ModelKind::Brusselator, f)->Bc;
        nb.no_replication = nb.B_max < nb.Bc_reference;
        return nb;
    }
    throw regime_mismatch("no-replication bounds cover Schnakenberg/Brusselator");
}

std::vector<double> outer_profile(const ModelSpec& model, const OuterSolve& solve,
                                  const std::vector<double>& x_grid) {
    if (!solve.converged) throw config_error("outer_profile needs a converged OuterSolve");
    OuterReduction red = models::outer_reduction(model);
    double v0 = solve.v0plus, mu = solve.mu;
    std::vector<double> out(x_grid.size());
    for (std::size_t i = 0; i < x_grid.size(); ++i) {
        double x = x_grid[i];
        if (x <= 0) {
            out[i] = v0;
            continue;
        }
        if (x >= solve.ell) {
            out[i] = mu;
            continue;
        }
        double target = std::sqrt(2.0 / solve.D_L) * x;
        out[i] = numerics::brent(
            [&](double w) { return chi_partial(red, w, mu, v0) - target; }, v0, mu, 1e-13);
    }
    return out;
}

// ---------------------------------------------------------------------------
// phase diagrams
// ---------------------------------------------------------------------------

PhaseDiagram phase_diagram(ModelKind family, int nx, int ny, double x_lo, double x_hi,
                           double y_lo, double y_hi, double eps_over_sqrtD) {
    if (nx < 2 || ny < 2) throw config_error("phase diagram grid needs nx, ny >= 2");
    PhaseDiagram pd;
    pd.family = family;
    pd.xs.resize(nx);
    pd.ys.resize(ny);
    for (int i = 0; i < nx; ++i) pd.xs[i] = x_lo + (x_hi - x_lo) * (i + 0.5) / nx;
    for (int j = 0; j < ny; ++j) pd.ys[j] = y_lo + (y_hi - y_lo) * (j + 0.5) / ny;
    pd.cells.assign(static_cast<std::size_t>(nx) * ny, Regime::NoInstability);
    auto th = computed_thresholds();
    double eps = eps_over_sqrtD; // grid spans dimensionless (eps already folded into D=1)

    if (family == ModelKind::Schnakenberg) {
        parallel_for(static_cast<std::ptrdiff_t>(nx) * ny, [&](std::ptrdiff_t c) {
            int j = static_cast<int>(c) / nx, i = static_cast<int>(c) % nx;
            double b = pd.xs[i], a = pd.ys[j];
            auto m = ModelSpec::schnakenberg_spec(a, b, eps, 1.0);
            pd.cells[c] = models::classify_regime(m, th);
        });
        PhaseDiagram::Curve ac{"a_c(b)", {}}, ab{"a=b", {}};
        std::vector<std::pair<double, double>> pts(41);
        parallel_for(41, [&](std::ptrdiff_t k) {
            double b = x_lo + (x_hi - x_lo) * k / 40.0;
            pts[k] = {b, b > 0 ? critical_a(b, eps, CriticalAMode::Full) : 0.0};
        });
        ac.points = pts;
        ab.points = {{std::max(x_lo, y_lo), std::max(x_lo, y_lo)}, {std::min(x_hi, y_hi), std::min(x_hi, y_hi)}};
        pd.boundaries = {ac, ab};
    } else if (family == ModelKind::Brusselator) {
        double fc = th.fc_brusselator;
        parallel_for(static_cast<std::ptrdiff_t>(nx) * ny, [&](std::ptrdiff_t c) {
            int j = static_cast<int>(c) / nx, i = static_cast<int>(c) % nx;
            double a = pd.xs[i], f = pd.ys[j];
            if (f <= 0 || f >= 1) return;
            auto m = ModelSpec::brusselator_spec(a, f, eps, 1.0);
            pd.cells[c] = models::classify_regime(m, th);
        });
        pd.boundaries = {{"f_c", {{x_lo, fc}, {x_hi, fc}}}, {"f=1/2", {{x_lo, 0.5}, {x_hi, 0.5}}}};
    } else {
        // GM regime depends on kappa only: a one-parameter bar over ys
        parallel_for(static_cast<std::ptrdiff_t>(nx) * ny, [&](std::ptrdiff_t c) {
            int j = static_cast<int>(c) / nx;
            double kappa = pd.ys[j];
            if (kappa < 0) return;
            auto m = ModelSpec::gm_spec(kappa, eps, 1.0);
            pd.cells[c] = models::classify_regime(m, th);
        });
        pd.boundaries = {{"kappa=1", {{x_lo, 1.0}, {x_hi, 1.0}}}};
    }
    return pd;
}

void save_phase_diagram_csv(const PhaseDiagram& pd, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << (pd.family == ModelKind::Schnakenberg ? "b,a,regime\n"
           : pd.family == ModelKind::Brusselator ? "a,f,regime\n"
                                                 : "x,kappa,regime\n");
    char buf[128];
    for (std::size_t j = 0; j < pd.ys.size(); ++j)
        for (std::size_t i = 0; i < pd.xs.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,%.17g,%s\n", pd.xs[i], pd.ys[j],
                          models::to_string(pd.cells[j * pd.xs.size() + i]).c_str());
            os << buf;
        }
}

void save_phase_diagram_svg(const PhaseDiagram& pd, const std::string& path) {
    const int W = 640, H = 480, ML = 60, MB = 40, MT = 20, MR = 20;
    double x_lo = pd.xs.front(), x_hi = pd.xs.back();
    double y_lo = pd.ys.front(), y_hi = pd.ys.back();
    auto px = [&](double x) { return ML + (x - x_lo) / (x_hi - x_lo) * (W - ML - MR); };
    auto py = [&](double y) { return H - MB - (y - y_lo) / (y_hi - y_lo) * (H - MB - MT); };
    auto color = [](Regime r) {
        switch (r) {
            case Regime::Replication: return "#4575b4";
            case Regime::Nucleation: return "#d73027";
            case Regime::Marginal: return "#fee090";
            case Regime::NoInstability: return "#bdbdbd";
        }
        return "#000000";
    };
    std::ostringstream svg;
    svg << "<svg xmlns='http://www.w3.org/2000/svg' width='" << W << "' height='" << H << "'>\n";
    double cw = double(W - ML - MR) / pd.xs.size();
    double ch = double(H - MB - MT) / pd.ys.size();
    for (std::size_t j = 0; j < pd.ys.size(); ++j)
        for (std::size_t i = 0; i < pd.xs.size(); ++i) {
            svg << "<rect x='" << px(pd.xs[i]) - cw / 2 << "' y='" << py(pd.ys[j]) - ch / 2
                << "' width='" << cw + 0.5 << "' height='" << ch + 0.5 << "' fill='"
                << color(pd.cells[j * pd.xs.size() + i]) << "'/>\n";
        }
    for (const auto& curve : pd.boundaries) {
        svg << "<polyline fill='none' stroke='black' stroke-width='1.5' points='";
        for (auto [x, y] : curve.points)
            if (x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi) svg << px(x) << "," << py(y) << " ";
        svg << "'/>\n";
    }
    svg << "<rect x='" << ML << "' y='" << MT << "' width='" << W - ML - MR << "' height='"
        << H - MB - MT << "' fill='none' stroke='black'/>\n</svg>\n";
    std::ofstream os(path);
    if (!os) throw io_error("cannot open " + path);
    os << svg.str();
}

nlohmann::json ThresholdResult::to_json() const {
    nlohmann::json j{{"K", K},
                     {"kind", models::to_string(kind)},
                     {"D_L_crit", D_L_crit},
                     {"L_crit", L_crit},
                     {"mu_at_crit", mu_at_crit},
                     {"method", method == Method::Full ? "full" : "small_param"}};
    if (B_at_crit != 0) j["B_at_crit"] = B_at_crit;
    if (H0L_at_crit != 0) j["H0L_at_crit"] = H0L_at_crit;
    return j;
}

} // namespace spikelab::outer
