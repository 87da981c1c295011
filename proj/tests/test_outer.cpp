#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "spikelab/errors.hpp"
#include "spikelab/outer.hpp"
#include "support/oracles.hpp"

using namespace spikelab;
using namespace spikelab::outer;
using models::ModelKind;
using models::ModelSpec;
using models::Regime;

namespace {
const ModelSpec sch_rep = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.01, 2.0);
const ModelSpec sch_nuc = ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0);
const ModelSpec bru_rep = ModelSpec::brusselator_spec(1.0, 0.8, 0.01, 2.0);
const ModelSpec bru_nuc = ModelSpec::brusselator_spec(1.0, 0.7, 0.01, 2.0);
const ModelSpec gm_nuc = ModelSpec::gm_spec(0.5, 0.01, 1.0);
} // namespace

TEST_CASE("chi: limits, monotonicity and the singular-form oracle") {
    auto red = models::outer_reduction(sch_nuc);
    double a = 0.5;
    double v0 = a * (1 + 1e-9);

    // mu -> v0+ sends chi -> 0
    CHECK(chi(red, v0 * (1 + 1e-10), v0) < 1e-4);

    // strictly increasing in mu, derivative positive by finite differences
    double prev = 0;
    for (int k = 1; k <= 50; ++k) {
        double mu = v0 + (2 * a - v0) * k / 50.0;
        double x = chi(red, mu, v0);
        CHECK(x > prev);
        prev = x;
        if (k < 50) {
            double h = 1e-6;
            double d = (chi(red, mu + h, v0) - chi(red, mu - h, v0)) / (2 * h);
            CHECK(d > 0);
        }
    }

    // proper form vs direct quadrature of the singular form (xi = mu - s^2)
    for (double mu : {1.2 * a, 1.6 * a, 2.0 * a}) {
        double proper = chi(red, mu, v0);
        double singular = oracles::chi_singular_form(red, mu, v0);
        CHECK(std::fabs(proper - singular) < 1e-6);
    }

    SUBCASE("domain errors outside the well-posed range") {
        CHECK_THROWS_AS(chi(red, 2.1 * a, v0), spikelab::domain_error);
        CHECK_THROWS_AS(chi(red, 1.5 * a, 0.4), spikelab::domain_error);
    }
}

TEST_CASE("chi diverges toward the homogeneous state") {
    auto red = models::outer_reduction(ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0));
    REQUIRE(red.v_infty().has_value());
    double vinf = *red.v_infty();
    double v0 = 1.5 * (1 + 1e-9);
    double x2 = chi(red, vinf - 1e-2, v0);
    double x4 = chi(red, vinf - 1e-4, v0);
    double x8 = chi(red, vinf - 1e-8, v0);
    CHECK(x4 > x2);
    CHECK(x8 > x4);
    // logarithmic divergence: roughly equal increments per decade pair
    double inc1 = x4 - x2, inc2 = x8 - x4;
    CHECK(inc2 > 0.5 * inc1);
}

TEST_CASE("quasi-equilibrium solves") {
    SUBCASE("L -> 0 sends mu -> v(0+) and B -> 0") {
        // leading-order v(0+): the O(eps) correction formula leaves its
        // validity range as B -> 0
        auto s5 = solve_quasi_equilibrium(sch_nuc, 1, 0.05, V0Mode::LeadingOrder);
        CHECK(s5.converged);
        CHECK(s5.mu - s5.v0plus < 0.01);
        auto s1 = solve_quasi_equilibrium(sch_nuc, 1, 0.01, V0Mode::LeadingOrder);
        CHECK(s1.B < 0.4 * s5.B);
        CHECK(s1.mu - s1.v0plus < 0.2 * (s5.mu - s5.v0plus));
    }
    SUBCASE("just below the nucleation threshold mu approaches 2a") {
        auto t = nucleation_threshold(sch_nuc, 1);
        auto s = solve_quasi_equilibrium(sch_nuc, 1, 0.995 * t.L_crit);
        CHECK(s.converged);
        CHECK(s.mu > 0.9 * 1.0);
        CHECK(s.mu < 1.0); // mu_max = 2a = 1
        CHECK(s.residual < 1e-8);
        CHECK(s.v0plus > 0.5);
        CHECK(s.v0plus < s.mu);
    }
    SUBCASE("beyond the nucleation threshold the mu_max constraint reports") {
        auto t = nucleation_threshold(sch_nuc, 1);
        try {
            solve_quasi_equilibrium(sch_nuc, 1, 1.05 * t.L_crit);
            FAIL("expected no_quasi_equilibrium");
        } catch (const no_quasi_equilibrium& e) {
            CHECK(e.failed_constraint == "mu_max");
        }
    }
    SUBCASE("beyond the replication threshold the B_c constraint reports") {
        auto t = replication_threshold(sch_rep, 1);
        try {
            solve_quasi_equilibrium(sch_rep, 1, 1.05 * t.L_crit);
            FAIL("expected no_quasi_equilibrium");
        } catch (const no_quasi_equilibrium& e) {
            CHECK(e.failed_constraint == "B_c");
        }
    }
    SUBCASE("GM solve matches the small-kappa closed form loosely") {
        auto s = solve_quasi_equilibrium(gm_nuc, 1, 3.0);
        CHECK(s.converged);
        auto est = small_param_h0(gm_nuc, 1, 3.0);
        CHECK(std::fabs(s.H0L - est.H0L) / est.H0L < 0.15);
        CHECK(s.H0L > 4 * 0.5); // gamma real
        CHECK(s.v0plus > 0.5);  // A(0+) > kappa
    }
}

TEST_CASE("B(mu) increasing and v0 ordering invariants") {
    auto s = solve_quasi_equilibrium(sch_nuc, 1, 1.2);
    CHECK(s.v0plus < s.mu);
    auto red = models::outer_reduction(sch_nuc);
    CHECK(s.mu <= red.mu_max());
    // B(mu) from the first integral is increasing in mu
    double pref = 2.0;
    double prev = -1;
    for (int k = 1; k <= 20; ++k) {
        double mu = s.v0plus + (red.mu_max() - s.v0plus) * k / 20.0;
        double B = std::sqrt(pref * (red.G(mu) - red.G(s.v0plus)));
        CHECK(B > prev);
        prev = B;
    }
}

TEST_CASE("thresholds reproduce the tabulated critical lengths") {
    // Schnakenberg a=0.2: replication at L1 ~ 1.98, L2 ~ 3.96
    auto r1 = replication_threshold(sch_rep, 1);
    CHECK(r1.L_crit > 1.92);
    CHECK(r1.L_crit < 2.04);
    auto r2 = replication_threshold(sch_rep, 2);
    CHECK(r2.L_crit == doctest::Approx(2 * r1.L_crit).epsilon(1e-12));
    CHECK(r2.L_crit > 3.84);
    CHECK(r2.L_crit < 4.08);
    CHECK(r1.D_L_crit == doctest::Approx(2.0 / (1 * std::pow(r1.L_crit / std::sqrt(1.0), 2)) * 1.0)
                             .epsilon(1e-9)); // D_L = D/L^2 with D=2: 2/L^2
    CHECK(r1.D_L_crit == doctest::Approx(sch_rep.bigD / (r1.L_crit * r1.L_crit)).epsilon(1e-10));

    // Schnakenberg a=0.5: nucleation at L1 ~ 1.65, L2 ~ 3.26
    auto n1 = nucleation_threshold(sch_nuc, 1);
    CHECK(n1.L_crit > 1.60);
    CHECK(n1.L_crit < 1.70);
    auto n2 = nucleation_threshold(sch_nuc, 2);
    CHECK(n2.L_crit > 3.16);
    CHECK(n2.L_crit < 3.36);

    // Brusselator f=0.8 replication L1 ~ 1.02; f=0.7 nucleation L1 ~ 1.35
    auto b1 = replication_threshold(bru_rep, 1);
    CHECK(b1.L_crit > 0.99);
    CHECK(b1.L_crit < 1.05);
    auto b2 = nucleation_threshold(bru_nuc, 1);
    CHECK(b2.L_crit > 1.31);
    CHECK(b2.L_crit < 1.39);

    // GM kappa=0.5, D=1: L1 ~ 3.81-3.89, L2 ~ 7.8
    auto g1 = nucleation_threshold(gm_nuc, 1);
    CHECK(g1.L_crit > 3.70);
    CHECK(g1.L_crit < 3.95);
    auto g2 = nucleation_threshold(gm_nuc, 2);
    CHECK(g2.L_crit > 7.5);
    CHECK(g2.L_crit < 8.1);

    SUBCASE("regime mismatches throw") {
        CHECK_THROWS_AS(replication_threshold(sch_nuc, 1), regime_mismatch);
        CHECK_THROWS_AS(nucleation_threshold(sch_rep, 1), regime_mismatch);
    }
}

TEST_CASE("critical curves a_c and f_c") {
    double ac_full = critical_a(1.0, 0.01 / std::sqrt(2.0), CriticalAMode::Full);
    CHECK(ac_full > 0.254);
    CHECK(ac_full < 0.262);
    double ac_closed = critical_a(1.0, 0.0, CriticalAMode::ClosedForm);
    CHECK(std::fabs(ac_closed - ac_full) / ac_full < 0.01);
    // closed form is linear in b
    double ac2 = critical_a(2.0, 0.0, CriticalAMode::ClosedForm);
    CHECK(ac2 == doctest::Approx(2 * ac_closed).epsilon(1e-12));

    double fc = critical_f();
    CHECK(fc > 0.764);
    CHECK(fc < 0.774);
    // residual of the defining relation at the root
    const auto& tab = brusselator_fold_table();
    std::vector<double> fs, Bcs;
    for (const auto& e : tab) {
        fs.push_back(e.f);
        Bcs.push_back(e.Bc);
    }
    numerics::Pchip Bc_of_f(fs, Bcs);
    double Bc = Bc_of_f(fc);
    CHECK(std::fabs(Bc * Bc * fc * fc / 2 - (-0.75 + fc + (1 - fc) * std::log(2.0))) < 1e-10);
}

TEST_CASE("threshold cross-consistency at a = a_c") {
    // at the transition both constructions give the same critical length
    double ac = critical_a(1.0, 0.01 / std::sqrt(2.0), CriticalAMode::Full);
    auto m = ModelSpec::schnakenberg_spec(ac, 1.0, 0.01, 2.0);
    auto rep = replication_threshold(m, 1); // Marginal regime admits both
    auto nuc = nucleation_threshold(m, 1);
    CHECK(std::fabs(rep.L_crit - nuc.L_crit) / nuc.L_crit < 1e-3);
}

TEST_CASE("small-parameter closed forms") {
    auto sp = small_param_threshold(sch_rep, 1);
    double Bc = core_tables(ModelKind::Schnakenberg)->Bc;
    CHECK(sp.L_crit == doctest::Approx(std::sqrt(2.0) / 0.2 * std::atanh(0.2 * Bc)).epsilon(1e-12));
    CHECK(sp.L_crit == doctest::Approx(1.95).epsilon(0.01));
    // tracks the full threshold within 15% at a = 0.2
    auto full = replication_threshold(sch_rep, 1);
    CHECK(std::fabs(sp.L_crit - full.L_crit) / full.L_crit < 0.15);

    auto spb = small_param_threshold(ModelSpec::brusselator_spec(0.15, 0.8, 0.01, 2.0), 1);
    auto fullb = replication_threshold(ModelSpec::brusselator_spec(0.15, 0.8, 0.01, 2.0), 1);
    CHECK(std::fabs(spb.L_crit - fullb.L_crit) / fullb.L_crit < 0.15);

    auto h0 = small_param_h0(gm_nuc, 1, 1.0);
    CHECK(h0.H0 == doctest::Approx(std::tanh(1.0) / 3.0).epsilon(1e-12));

    SUBCASE("prefactor domain") {
        // B_c sqrt(1-f) >= 1 for small f would leave atanh's domain
        auto bad = ModelSpec::brusselator_spec(0.1, 0.51, 0.01, 2.0);
        CHECK_THROWS_AS(small_param_threshold(bad, 1), spikelab::error);
    }
}

TEST_CASE("tau-form Brusselator: four-spike window contains L = 1") {
    // eps=0.01, D_u=0.02, tau=0.001 maps to a=sqrt(10), D=20; at f=0.95 the
    // fixed domain L=1 sits between the two- and four-spike replication
    // thresholds, matching the observed four-spike steady state
    auto m = models::brusselator_from_tau_form(0.01, 0.02, 0.001, 0.95);
    CHECK(outer::classify(m) == Regime::Replication);
    auto L2 = replication_threshold(m, 2);
    auto L4 = replication_threshold(m, 4);
    CHECK(L2.L_crit < 1.0);
    CHECK(L4.L_crit > 1.0);
}

TEST_CASE("no-replication bounds") {
    CHECK(F_s(1.0 + 1e-9) == doctest::Approx(0.0).epsilon(1e-4));
    CHECK(F_s(2.0) == doctest::Approx(std::sqrt(2 * std::log(2.0) - 1)).epsilon(1e-14));
    // F_b decreasing with sup 1 at f -> 0+
    CHECK(F_b(1e-4) > F_b(0.1));
    CHECK(F_b(0.1) > F_b(0.4));
    CHECK(F_b(1e-6) == doctest::Approx(1.0).epsilon(1e-5));

    auto nb = norep_bound(ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0));
    CHECK(nb.B_max == doctest::Approx(std::sqrt(2 * std::log(2.0) - 1)));
    CHECK(nb.no_replication);
    auto nbb = norep_bound(ModelSpec::brusselator_spec(1.0, 0.3, 0.01, 2.0));
    CHECK(nbb.B_max == 1.0);
    CHECK(nbb.no_replication); // 1 < B_c(f) on (0, 1/2)
    CHECK_THROWS_AS(norep_bound(sch_nuc), regime_mismatch);
}

TEST_CASE("no-instability regimes solve for any D_L") {
    for (const auto& m :
         {ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0),
          ModelSpec::brusselator_spec(1.0, 0.3, 0.01, 2.0), ModelSpec::gm_spec(1.5, 0.01, 1.0)}) {
        for (int k = 0; k < 7; ++k) {
            // the L in [0.5, 6] window of the no-fold continuation check;
            // beyond it the domain shrinks below the semi-strong regime or
            // mu - v_infty leaves double resolution
            double L = 0.5 * std::pow(12.0, k / 6.0);
            auto s = solve_quasi_equilibrium(m, 1, L);
            CHECK(s.converged);
            auto red = models::outer_reduction(m);
            CHECK(s.mu < *red.v_infty());
        }
    }
}

TEST_CASE("outer profile inverts chi") {
    auto s = solve_quasi_equilibrium(sch_nuc, 1, 1.2);
    std::vector<double> xs{0.0, 0.2, 0.5, 0.8, 1.0};
    auto v = outer_profile(sch_nuc, s, xs);
    CHECK(v.front() == doctest::Approx(s.v0plus));
    CHECK(v.back() == doctest::Approx(s.mu));
    for (std::size_t i = 1; i < v.size(); ++i) CHECK(v[i] > v[i - 1]); // dv/dx > 0
}

TEST_CASE("phase diagram labels and boundaries") {
    auto pd = phase_diagram(ModelKind::Schnakenberg, 12, 12, 0.5, 2.0, 0.05, 2.0, 0.01 / std::sqrt(2.0));
    // locate the cell containing (b=1, a=0.2): replication
    auto cell = [&](double x, double y) {
        std::size_t i = 0, j = 0;
        for (std::size_t k = 0; k < pd.xs.size(); ++k)
            if (std::fabs(pd.xs[k] - x) < std::fabs(pd.xs[i] - x)) i = k;
        for (std::size_t k = 0; k < pd.ys.size(); ++k)
            if (std::fabs(pd.ys[k] - y) < std::fabs(pd.ys[j] - y)) j = k;
        return pd.cells[j * pd.xs.size() + i];
    };
    CHECK(cell(1.0, 0.2) == Regime::Replication);
    CHECK(cell(1.0, 0.6) == Regime::Nucleation);
    CHECK(cell(1.0, 1.8) == Regime::NoInstability);
    REQUIRE(!pd.boundaries.empty());
    CHECK(pd.boundaries[0].name == "a_c(b)");

    auto pdb = phase_diagram(ModelKind::Brusselator, 8, 16, 0.5, 2.0, 0.05, 0.99, 0.0071);
    auto cellb = [&](double a, double f) {
        std::size_t i = 0, j = 0;
        for (std::size_t k = 0; k < pdb.xs.size(); ++k)
            if (std::fabs(pdb.xs[k] - a) < std::fabs(pdb.xs[i] - a)) i = k;
        for (std::size_t k = 0; k < pdb.ys.size(); ++k)
            if (std::fabs(pdb.ys[k] - f) < std::fabs(pdb.ys[j] - f)) j = k;
        return pdb.cells[j * pdb.xs.size() + i];
    };
    CHECK(cellb(1.0, 0.7) == Regime::Nucleation);
    CHECK(cellb(1.0, 0.85) == Regime::Replication);
    CHECK(cellb(1.0, 0.3) == Regime::NoInstability);
}
