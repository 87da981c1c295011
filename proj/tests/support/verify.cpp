#include "verify.hpp"
#include "oracles.hpp"

#include "spikelab/continuation.hpp"
#include "spikelab/core.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/outer.hpp"
#include "spikelab/pde.hpp"
#include "spikelab/spectrum.hpp"

#include <chrono>
#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

namespace spikelab::verify {

using models::ModelKind;
using models::ModelSpec;

namespace {

struct Harness {
    std::vector<CriterionResult>& results;
    std::ostream* progress;

    void run(const std::string& id, const std::string& desc,
             const std::function<std::pair<bool, std::string>()>& body) {
        if (progress) *progress << "criterion " << id << ": " << desc << "..." << std::endl;
        CriterionResult r;
        r.id = id;
        r.description = desc;
        auto t0 = std::chrono::steady_clock::now();
        try {
            auto [pass, detail] = body();
            r.pass = pass;
            r.detail = detail;
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("exception: ") + e.what();
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        if (progress)
            *progress << "  -> " << (r.pass ? "PASS" : "FAIL") << " (" << r.detail << ")"
                      << std::endl;
        results.push_back(std::move(r));
    }

    void note(const std::string& id, const std::string& desc, const std::string& detail) {
        CriterionResult r;
        r.id = id;
        r.description = desc;
        r.pass = true;
        r.informational = true;
        r.detail = detail;
        results.push_back(std::move(r));
    }
};

std::string fmt(double v, int prec = 4) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    return buf;
}

bool in_band(double v, double lo, double hi) { return v >= lo && v <= hi; }

struct EventCheck {
    double L_target;       // item-5 threshold the event must sit within 3% of
    pde::EventKind kind;
    double count_after;
};

std::pair<bool, std::string> check_scenario(const ModelSpec& model, double L_end, int n,
                                            const std::vector<EventCheck>& expected,
                                            double tolerance = 0.03) {
    pde::SimConfig cfg;
    cfg.model = model;
    cfg.rho = 1e-4;
    cfg.L0 = 1.0;
    cfg.L_end = L_end;
    cfg.n = n;
    auto traj = pde::simulate_growing(cfg);
    std::ostringstream os;
    bool ok = traj.min_v > 0 && traj.min_u > 0;
    os << "events:";
    for (const auto& e : traj.events.entries)
        os << " L=" << fmt(e.L) << "(" << pde::to_string(e.kind) << "," << e.count_before << "->"
           << e.count_after << ")";
    if (traj.events.entries.size() < expected.size()) {
        os << " [expected " << expected.size() << "]";
        return {false, os.str()};
    }
    for (std::size_t k = 0; k < expected.size(); ++k) {
        const auto& e = traj.events.entries[k];
        const auto& x = expected[k];
        double rel = std::fabs(e.L - x.L_target) / x.L_target;
        if (rel > tolerance) ok = false;
        if (e.kind != x.kind) ok = false;
        if (std::fabs(e.count_after - x.count_after) > 1e-9) ok = false;
        os << " rel" << k << "=" << fmt(100 * rel, 2) << "%";
    }
    if (!(traj.min_v > 0 && traj.min_u > 0)) os << " positivity violated";
    return {ok, os.str()};
}

} // namespace

std::vector<CriterionResult> run_acceptance(const Options& opts, std::ostream* progress) {
    std::vector<CriterionResult> results;
    Harness H{results, progress};

    const auto sch_rep = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.01, 2.0);
    const auto sch_nuc = ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0);
    const auto bru_rep = ModelSpec::brusselator_spec(1.0, 0.8, 0.01, 2.0);
    const auto bru_nuc = ModelSpec::brusselator_spec(1.0, 0.7, 0.01, 2.0);
    const auto gm_nuc = ModelSpec::gm_spec(0.5, 0.01, 1.0);

    // 1. Schnakenberg core fold
    H.run("1", "Schnakenberg core fold B_c, beta_c, C_s(B_c)", [&] {
        auto t = outer::core_tables(ModelKind::Schnakenberg);
        bool ok = in_band(t->Bc, 1.347 - 0.005, 1.347 + 0.005) &&
                  in_band(t->beta_c, 1.015 - 0.01, 1.015 + 0.01) &&
                  in_band(t->C_at_Bc, 0.247 - 0.01, 0.247 + 0.01);
        return std::pair{ok, "B_c=" + fmt(t->Bc, 6) + " beta_c=" + fmt(t->beta_c, 6) +
                                 " C_s=" + fmt(t->C_at_Bc, 6)};
    });

    // 2. beta -> 3/2 as B -> 0+
    H.run("2", "beta(B=1e-3) within 0.01 of 3/2 on the primary branch", [&] {
        auto sol = core::solve_core(ModelKind::Schnakenberg, std::nullopt,
                                    core::CoreTarget::pin_B(1e-3));
        return std::pair{std::fabs(sol.beta - 1.5) < 0.01, "beta=" + fmt(sol.beta, 8)};
    });

    // 3. Brusselator core folds
    H.run("3", "Brusselator folds B_c(0.8), B_c(0.95) with C_b(B_c)", [&] {
        auto t8 = outer::core_tables(ModelKind::Brusselator, 0.8);
        auto t95 = outer::core_tables(ModelKind::Brusselator, 0.95);
        bool ok = in_band(t8->Bc, 0.685 - 0.005, 0.685 + 0.005) &&
                  in_band(t95->Bc, 0.245 - 0.005, 0.245 + 0.005) &&
                  in_band(t95->C_at_Bc, 1.36 - 0.02, 1.36 + 0.02);
        return std::pair{ok, "B_c(0.8)=" + fmt(t8->Bc, 6) + " B_c(0.95)=" + fmt(t95->Bc, 6) +
                                 " C_b=" + fmt(t95->C_at_Bc, 6)};
    });

    // 4. critical curves
    H.run("4", "a_c(1) full/closed-form and f_c", [&] {
        double eps_s = 0.01 / std::sqrt(2.0);
        double ac = outer::critical_a(1.0, eps_s, outer::CriticalAMode::Full);
        double acc = outer::critical_a(1.0, eps_s, outer::CriticalAMode::ClosedForm);
        double fc = outer::critical_f();
        bool ok = in_band(ac, 0.258 - 0.004, 0.258 + 0.004) &&
                  std::fabs(acc - ac) / ac < 0.01 && in_band(fc, 0.769 - 0.005, 0.769 + 0.005);
        return std::pair{ok, "a_c=" + fmt(ac, 6) + " closed=" + fmt(acc, 6) + " f_c=" + fmt(fc, 6)};
    });

    // 5. thresholds
    double L1_sch_rep = 0, L1_sch_nuc = 0, L1_bru_rep = 0, L1_bru_nuc = 0, L1_gm = 0, L2_gm = 0;
    H.run("5", "critical lengths for the five scenarios", [&] {
        auto r1 = outer::replication_threshold(sch_rep, 1);
        auto r2 = outer::replication_threshold(sch_rep, 2);
        auto n1 = outer::nucleation_threshold(sch_nuc, 1);
        auto n2 = outer::nucleation_threshold(sch_nuc, 2);
        auto b1 = outer::replication_threshold(bru_rep, 1);
        auto b2 = outer::nucleation_threshold(bru_nuc, 1);
        auto g1 = outer::nucleation_threshold(gm_nuc, 1);
        auto g2 = outer::nucleation_threshold(gm_nuc, 2);
        L1_sch_rep = r1.L_crit;
        L1_sch_nuc = n1.L_crit;
        L1_bru_rep = b1.L_crit;
        L1_bru_nuc = b2.L_crit;
        L1_gm = g1.L_crit;
        L2_gm = g2.L_crit;
        bool ok = in_band(r1.L_crit, 1.92, 2.04) && in_band(r2.L_crit, 3.84, 4.08) &&
                  in_band(n1.L_crit, 1.60, 1.70) && in_band(n2.L_crit, 3.16, 3.36) &&
                  in_band(b1.L_crit, 0.99, 1.05) && in_band(b2.L_crit, 1.31, 1.39) &&
                  in_band(g1.L_crit, 3.70, 3.95) && in_band(g2.L_crit, 7.5, 8.1);
        return std::pair{ok, "Sch rep L1=" + fmt(r1.L_crit) + " L2=" + fmt(r2.L_crit) +
                                 "; Sch nuc L1=" + fmt(n1.L_crit) + " L2=" + fmt(n2.L_crit) +
                                 "; Bru rep L1=" + fmt(b1.L_crit) + " nuc L1=" + fmt(b2.L_crit) +
                                 "; GM L1=" + fmt(g1.L_crit) + " L2=" + fmt(g2.L_crit)};
    });

    // 6. continuation folds vs thresholds
    if (opts.long_runs) {
        H.run("6", "full steady continuation folds within 5% of the thresholds", [&] {
            struct Case {
                ModelSpec model;
                double L_ref;
                int n;
            };
            std::vector<Case> cases{{sch_nuc, L1_sch_nuc, opts.continuation_n},
                                    {sch_rep, L1_sch_rep, opts.continuation_n},
                                    {bru_rep, L1_bru_rep, opts.continuation_n},
                                    {bru_nuc, L1_bru_nuc, opts.continuation_n},
                                    {gm_nuc, L1_gm, 2 * opts.continuation_n}};
            std::ostringstream os;
            bool ok = true;
            for (auto& c : cases) {
                auto start = continuation::steady_solve_pattern(c.model, 0.75 * c.L_ref, c.n, 2, false);
                continuation::ContinueOptions co;
                co.L_min = 0.4;
                co.L_max = 1.6 * c.L_ref;
                co.compute_stability = false;
                auto br = continuation::continue_in_L(c.model, start, +1, co);
                if (br.folds.empty()) {
                    ok = false;
                    os << " no-fold;";
                    continue;
                }
                double rel = std::fabs(br.folds[0].L - c.L_ref) / c.L_ref;
                if (rel > 0.05) ok = false;
                os << " L=" << fmt(br.folds[0].L) << "(" << fmt(100 * rel, 2) << "%)";
            }
            return std::pair{ok, os.str()};
        });

        // 7. growing-domain simulations
        H.run("7a", "Schnakenberg a=0.2 simulation: two replications at L1, L2", [&] {
            return check_scenario(sch_rep, 2.08 * L1_sch_rep, opts.sim_n,
                                  {{L1_sch_rep, pde::EventKind::Replication, 2},
                                   {2 * L1_sch_rep, pde::EventKind::Replication, 4}});
        });
        H.run("7b", "Schnakenberg a=0.5 simulation: boundary then interior nucleation", [&] {
            return check_scenario(sch_nuc, 2.08 * L1_sch_nuc, opts.sim_n,
                                  {{L1_sch_nuc, pde::EventKind::NucleationBoundary, 2},
                                   {2 * L1_sch_nuc, pde::EventKind::NucleationInterior, 4}});
        });
        H.run("7c", "Brusselator f=0.8 simulation: two replications", [&] {
            return check_scenario(bru_rep, 2.08 * L1_bru_rep, opts.sim_n,
                                  {{L1_bru_rep, pde::EventKind::Replication, 2},
                                   {2 * L1_bru_rep, pde::EventKind::Replication, 4}});
        });
        H.run("7d", "Brusselator f=0.7 simulation: boundary then interior nucleation", [&] {
            return check_scenario(bru_nuc, 2.08 * L1_bru_nuc, opts.sim_n,
                                  {{L1_bru_nuc, pde::EventKind::NucleationBoundary, 2},
                                   {2 * L1_bru_nuc, pde::EventKind::NucleationInterior, 4}});
        });
        H.run("7e", "GM kappa=0.5 simulation: boundary then interior nucleation", [&] {
            return check_scenario(gm_nuc, 1.04 * L2_gm, 2 * opts.sim_n,
                                  {{L1_gm, pde::EventKind::NucleationBoundary, 2},
                                   {L2_gm, pde::EventKind::NucleationInterior, 4}});
        });
        H.run("7f", "fast variant (eps=0.04, D=4, rho=0.0016): jump sequences", [&] {
            auto fast_rep = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.04, 4.0);
            auto fast_nuc = ModelSpec::schnakenberg_spec(0.5, 1.0, 0.04, 4.0);
            auto tr = outer::replication_threshold(fast_rep, 1);
            auto tn = outer::nucleation_threshold(fast_nuc, 1);
            std::ostringstream os;
            bool ok = true;
            {
                pde::SimConfig cfg;
                cfg.model = fast_rep;
                cfg.rho = 0.0016;
                cfg.L_end = 2.2 * tr.L_crit;
                cfg.n = 2048;
                auto traj = pde::simulate_growing(cfg);
                // 1 -> 2 -> 4 interior spikes through replications
                double final_count = traj.spike_track.back().count;
                bool seq = traj.events.entries.size() >= 2 &&
                           traj.events.entries[0].kind == pde::EventKind::Replication &&
                           traj.events.entries[0].count_after == 2 &&
                           traj.events.entries[1].kind == pde::EventKind::Replication &&
                           traj.events.entries[1].count_after == 4 && final_count == 4;
                ok = ok && seq;
                os << "a=0.2: " << traj.events.entries.size() << " events, final count "
                   << final_count << "; ";
            }
            {
                pde::SimConfig cfg;
                cfg.model = fast_nuc;
                cfg.rho = 0.0016;
                cfg.L_end = 2.25 * tn.L_crit;
                cfg.n = 2048;
                auto traj = pde::simulate_growing(cfg);
                // 1 -> (1 interior + 2 boundary) -> (3 interior + 2 boundary)
                double final_count = traj.spike_track.back().count;
                bool seq = traj.events.entries.size() >= 2 &&
                           traj.events.entries[0].kind == pde::EventKind::NucleationBoundary &&
                           traj.events.entries[0].count_after == 2 &&
                           traj.events.entries[1].kind == pde::EventKind::NucleationInterior &&
                           traj.events.entries[1].count_after == 4 && final_count == 4;
                ok = ok && seq;
                os << "a=0.5: " << traj.events.entries.size() << " events, final count "
                   << final_count;
            }
            return std::pair{ok, os.str()};
        });

        // 8. no-instability regimes
        H.run("8", "no folds on L in [0.5,6]; outer solves at 20 D_L values; lemma bounds", [&] {
            std::vector<ModelSpec> models{ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0),
                                          ModelSpec::brusselator_spec(1.0, 0.3, 0.01, 2.0),
                                          ModelSpec::gm_spec(1.5, 0.01, 1.0)};
            std::ostringstream os;
            bool ok = true;
            for (const auto& m : models) {
                auto start = continuation::steady_solve_pattern(m, 1.0, 2 * opts.continuation_n, 2,
                                                                false);
                continuation::ContinueOptions co;
                co.L_min = 0.5;
                co.L_max = 6.0;
                co.compute_stability = false;
                co.max_points = 600;
                auto up = continuation::continue_in_L(m, start, +1, co);
                auto down = continuation::continue_in_L(m, start, -1, co);
                std::size_t folds = up.folds.size() + down.folds.size();
                double L_lo = 1.0, L_hi = 1.0;
                for (const auto& p : up.points) {
                    L_lo = std::min(L_lo, p.L);
                    L_hi = std::max(L_hi, p.L);
                }
                for (const auto& p : down.points) {
                    L_lo = std::min(L_lo, p.L);
                    L_hi = std::max(L_hi, p.L);
                }
                os << models::to_string(m.kind) << ": folds=" << folds << " L in ["
                   << fmt(L_lo, 4) << "," << fmt(L_hi, 4) << "]";
                if (folds > 0) {
                    double Lf = !down.folds.empty() ? down.folds[0].L : up.folds[0].L;
                    os << " (fold at L=" << fmt(Lf, 5)
                       << ": grid-converged steady-state existence boundary; the one-spike state "
                          "does not exist below it, so the stated [0.5,6] no-fold window cannot "
                          "hold for this model)";
                    ok = false;
                } else if (L_lo > 0.55 || L_hi < 5.9) {
                    ok = false;
                    os << " (range not covered)";
                }
                // section-5 solvability is a leading-order statement; the
                // epsilon-corrected closure leaves its validity range at small L
                int solved = 0;
                for (int k = 0; k < 20; ++k) {
                    double L = 0.5 * std::pow(12.0, k / 19.0);
                    try {
                        auto s = outer::solve_quasi_equilibrium(m, 1, L, outer::V0Mode::LeadingOrder);
                        if (s.converged) ++solved;
                    } catch (const error&) {
                    }
                }
                if (solved != 20) ok = false;
                os << "; QE solves " << solved << "/20. ";
            }
            double Fs_max = outer::F_s(2.0);
            double exact = std::sqrt(2.0 * std::log(2.0) - 1.0);
            bool fs_ok = std::fabs(Fs_max - exact) < 1e-12;
            // F_b sup at f -> 0+ by Richardson from f and f/2 (linear in f)
            double f0 = 1e-3;
            double fb_lim = 2.0 * outer::F_b(f0 / 2) - outer::F_b(f0);
            bool fb_ok = std::fabs(fb_lim - 1.0) < 1e-6;
            if (!fs_ok || !fb_ok) ok = false;
            os << "F_s(2)-sqrt(2log2-1)=" << fmt(Fs_max - exact, 3)
               << " F_b sup=" << fmt(fb_lim, 8);
            return std::pair{ok, os.str()};
        });
    }

    // 9. invariant suites
    H.run("9", "module invariants: identities, monotonicity, dimple mode, grid halving", [&] {
        std::ostringstream os;
        bool ok = true;
        // G' = -R g for all three models at sampled points
        for (const auto& m : {sch_nuc, bru_rep, gm_nuc}) {
            auto red = models::outer_reduction(m);
            double lo = red.wellposed_lo(), hi = red.wellposed_hi();
            for (int i = 1; i <= 40; ++i) {
                double xi = lo + (hi - lo) * i / 41.0;
                if (std::fabs(red.Gprime(xi) + red.R(xi) * red.g(xi)) >
                    1e-10 * (1 + std::fabs(red.Gprime(xi))))
                    ok = false;
            }
        }
        os << "G'=-Rg " << (ok ? "ok" : "FAIL") << "; ";
        // chi monotone in mu
        {
            auto red = models::outer_reduction(sch_nuc);
            double v0 = 0.5 * (1 + 1e-9);
            double prev = -1;
            for (int k = 1; k <= 30; ++k) {
                double mu = v0 + (1.0 - v0) * k / 30.0;
                double x = outer::chi(red, mu, v0);
                if (x <= prev) ok = false;
                prev = x;
            }
            os << "chi monotone; ";
        }
        // flux identities
        {
            auto s = core::solve_core(ModelKind::Schnakenberg, std::nullopt,
                                      core::CoreTarget::pin_B(0.5));
            bool f1 = std::fabs(core::flux_quadrature(s) - s.B) / s.B < 1e-4;
            auto b = core::solve_core(ModelKind::Brusselator, 0.8, core::CoreTarget::pin_B(0.3));
            bool f2 = std::fabs(core::flux_quadrature(b) - b.B) / b.B < 1e-4;
            bool tails = s.tail_deviation < 1e-4 && b.tail_deviation < 1e-4;
            if (!f1 || !f2 || !tails) ok = false;
            os << "flux+tail " << ((f1 && f2 && tails) ? "ok" : "FAIL") << "; ";
        }
        // fold zero eigenvalue with dimple mode
        {
            core::StepControl st;
            st.stop_after_fold = true;
            auto br = core::continue_core_branch(ModelKind::Schnakenberg, std::nullopt, {0, 0}, st,
                                                 core::GridSpec{16.0, 801});
            auto r = spectrum::core_spectrum(*br.fold->solution, 2);
            bool zero = std::fabs(r.eigenvalues[0].real()) < 1e-3;
            double delta = 2e-3;
            auto hi = core::solve_core(ModelKind::Schnakenberg, std::nullopt,
                                       core::CoreTarget::pin_beta(br.fold->beta_c + delta),
                                       core::GridSpec{16.0, 801}, br.fold->solution.get());
            auto lo = core::solve_core(ModelKind::Schnakenberg, std::nullopt,
                                       core::CoreTarget::pin_beta(br.fold->beta_c - delta),
                                       core::GridSpec{16.0, 801}, br.fold->solution.get());
            double dot = 0, n1 = 0, n2 = 0;
            for (int i = 0; i < hi.n(); ++i) {
                double dv = (hi.V0[i] - lo.V0[i]) / (2 * delta);
                dot += dv * r.modes[0].Phi0[i];
                n1 += dv * dv;
                n2 += r.modes[0].Phi0[i] * r.modes[0].Phi0[i];
            }
            double cosim = std::fabs(dot) / std::sqrt(n1 * n2);
            if (!zero || cosim <= 0.99) ok = false;
            os << "fold eig " << fmt(r.eigenvalues[0].real(), 2) << " cos=" << fmt(cosim, 4)
               << "; ";
        }
        // spatial convergence of the PDE: halving h moves the first event by
        // less than 0.5% (fast-variant scenario)
        if (opts.long_runs) {
            auto fast = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.04, 4.0);
            auto thr = outer::replication_threshold(fast, 1);
            double Ls[2] = {0, 0};
            int ns[2] = {1024, 2048};
            for (int k = 0; k < 2; ++k) {
                pde::SimConfig cfg;
                cfg.model = fast;
                cfg.rho = 0.0016;
                cfg.L_end = 1.12 * thr.L_crit;
                cfg.n = ns[k];
                auto traj = pde::simulate_growing(cfg);
                if (traj.events.entries.empty()) ok = false;
                else Ls[k] = traj.events.entries[0].L;
            }
            double rel = std::fabs(Ls[0] - Ls[1]) / Ls[1];
            if (rel > 0.005) ok = false;
            os << "event-L h-halving rel=" << fmt(100 * rel, 2) << "%; ";
        }
        // grid halving of the core goldens stays inside the stated bands
        {
            core::StepControl st;
            st.stop_after_fold = true;
            auto half = core::continue_core_branch(ModelKind::Schnakenberg, std::nullopt, {0, 0},
                                                   st, core::GridSpec{16.0, 1601});
            bool inband = half.fold && in_band(half.fold->B_c, 1.342, 1.352) &&
                          in_band(half.fold->beta_c, 1.005, 1.025);
            if (!inband) ok = false;
            os << "half-grid B_c=" << fmt(half.fold ? half.fold->B_c : 0, 6);
        }
        return std::pair{ok, os.str()};
    });

    // 10. cross-oracle checks
    H.run("10", "oracles: chi forms, shooting core, small-parameter forms", [&] {
        std::ostringstream os;
        bool ok = true;
        {
            auto red = models::outer_reduction(sch_nuc);
            double v0 = 0.5 * (1 + 1e-9);
            double worst = 0;
            for (double mu : {0.6, 0.8, 1.0}) {
                double proper = outer::chi(red, mu, v0);
                double singular = oracles::chi_singular_form(red, mu, v0);
                worst = std::max(worst, std::fabs(proper - singular));
            }
            if (worst > 1e-6) ok = false;
            os << "chi forms diff=" << fmt(worst, 2) << "; ";
        }
        {
            auto s = core::solve_core(ModelKind::Schnakenberg, std::nullopt,
                                      core::CoreTarget::pin_B(0.5));
            auto sh = oracles::shoot_core(ModelKind::Schnakenberg, 0.0, 0.5);
            double diff = std::fabs(s.C - sh.C);
            if (!sh.converged || diff > 1e-3) ok = false;
            os << "shooting dC=" << fmt(diff, 2) << "; ";
        }
        {
            auto sp = outer::small_param_threshold(sch_rep, 1);
            auto full = outer::replication_threshold(sch_rep, 1);
            double rel1 = std::fabs(sp.L_crit - full.L_crit) / full.L_crit;
            auto bru_small = ModelSpec::brusselator_spec(0.15, 0.8, 0.01, 2.0);
            auto spb = outer::small_param_threshold(bru_small, 1);
            auto fullb = outer::replication_threshold(bru_small, 1);
            double rel2 = std::fabs(spb.L_crit - fullb.L_crit) / fullb.L_crit;
            auto gm_small = ModelSpec::gm_spec(0.05, 0.01, 1.0);
            auto est = outer::small_param_h0(gm_small, 1, 3.0);
            auto qe = outer::solve_quasi_equilibrium(gm_small, 1, 3.0);
            double rel3 = std::fabs(est.H0L - qe.H0L) / qe.H0L;
            if (rel1 > 0.15 || rel2 > 0.15 || rel3 > 0.15) ok = false;
            os << "small-param rel: sch=" << fmt(100 * rel1, 3) << "% bru=" << fmt(100 * rel2, 3)
               << "% gm=" << fmt(100 * rel3, 3) << "%";
        }
        return std::pair{ok, os.str()};
    });

    H.note("-", "excluded at desk scale",
           "two-parameter fold continuation of the infinite-domain existence region and the "
           "b-ramp on |x|<=50 are out of scope; mode-transition failure runs (very slow/fast "
           "growth) are observational scenarios without pass/fail thresholds");

    return results;
}

void print_matrix(const std::vector<CriterionResult>& results, std::ostream& os) {
    for (const auto& r : results) {
        if (r.informational) {
            os << "[INFO] " << r.id << "  " << r.description << ": " << r.detail << "\n";
            continue;
        }
        char line[160];
        std::snprintf(line, sizeof line, "[%s] %-3s %-58s (%.1fs)", r.pass ? "PASS" : "FAIL",
                      r.id.c_str(), r.description.c_str(), r.seconds);
        os << line << "\n       " << r.detail << "\n";
    }
    int pass = 0, total = 0;
    for (const auto& r : results)
        if (!r.informational) {
            ++total;
            pass += r.pass;
        }
    os << pass << "/" << total << " criteria passed\n";
}

bool all_passed(const std::vector<CriterionResult>& results) {
    for (const auto& r : results)
        if (!r.informational && !r.pass) return false;
    return true;
}

} // namespace spikelab::verify
