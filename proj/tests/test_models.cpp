#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "spikelab/errors.hpp"
#include "spikelab/models.hpp"

using namespace spikelab;
using namespace spikelab::models;

TEST_CASE("outer reduction closed forms") {
    auto sch = outer_reduction(ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0));
    CHECK(sch.g(0.5 + 1e-15) == doctest::Approx(4.0).epsilon(1e-9)); // (2a-v)/v^3 at v=a

    auto sch11 = outer_reduction(ModelSpec::schnakenberg_spec(1.0, 1.0, 0.01, 2.0));
    double dG = sch11.G(2.0) - sch11.G(1.0 + 1e-15);
    CHECK(dG == doctest::Approx(-0.75 + 0.25 + std::log(2.0)).epsilon(1e-9));

    auto bru = outer_reduction(ModelSpec::brusselator_spec(1.3, 0.7, 0.01, 2.0));
    CHECK(bru.R(1.3 + 1e-15) == doctest::Approx(-1.3 * 0.7).epsilon(1e-9));

    auto gm = outer_reduction(ModelSpec::gm_spec(0.5, 0.01, 1.0));
    CHECK(gm.R(1.0) == doctest::Approx(-1.0).epsilon(1e-12)); // R_g(2k) = 4k(k-1)
}

TEST_CASE("G' = -R g identity and finite-difference consistency") {
    std::mt19937 rng(7);
    auto check_model = [&](const OuterReduction& red) {
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double lo = red.wellposed_lo(), hi = red.wellposed_hi();
        for (int k = 0; k < 100; ++k) {
            double xi = lo + (0.02 + 0.96 * u(rng)) * (hi - lo);
            CHECK(red.Gprime(xi) == doctest::Approx(-red.R(xi) * red.g(xi)).epsilon(1e-12));
            double h = 1e-6 * xi;
            double fd = (red.G(xi + h) - red.G(xi - h)) / (2 * h);
            CHECK(fd == doctest::Approx(red.Gprime(xi)).epsilon(1e-6));
        }
    };
    check_model(outer_reduction(ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0)));
    check_model(outer_reduction(ModelSpec::brusselator_spec(1.0, 0.8, 0.01, 2.0)));
    check_model(outer_reduction(ModelSpec::gm_spec(0.5, 0.01, 1.0)));
}

TEST_CASE("lemma sign structure on the well-posed window") {
    // a<b, 1/2<f<1, 0<kappa<1: R<0 and G'>0 throughout (a,2a) / (kappa,2kappa)
    auto sch = outer_reduction(ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0));
    auto bru = outer_reduction(ModelSpec::brusselator_spec(1.0, 0.8, 0.01, 2.0));
    auto gm = outer_reduction(ModelSpec::gm_spec(0.5, 0.01, 1.0));
    for (const auto* red : {&sch, &bru, &gm}) {
        double lo = red->wellposed_lo(), hi = red->wellposed_hi();
        for (int i = 1; i <= 100; ++i) {
            double xi = lo + (hi - lo) * i / 101.0;
            CHECK(red->R(xi) < 0);
            CHECK(red->Gprime(xi) > 0);
        }
        CHECK_FALSE(red->v_infty().has_value());
    }
    // R_g -> -inf as xi -> kappa+
    CHECK(gm.R(0.5 * (1 + 1e-9)) < -1e6);
}

TEST_CASE("homogeneous state detection in no-instability regimes") {
    auto sch = outer_reduction(ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0));
    REQUIRE(sch.v_infty().has_value());
    CHECK(*sch.v_infty() == doctest::Approx(2.5));
    CHECK(sch.R(*sch.v_infty()) == doctest::Approx(0.0));
    CHECK(sch.Rprime(*sch.v_infty()) > 0);
    CHECK(*sch.v_infty() > sch.wellposed_lo());
    CHECK(*sch.v_infty() < sch.wellposed_hi());

    auto bru = outer_reduction(ModelSpec::brusselator_spec(1.0, 0.3, 0.01, 2.0));
    REQUIRE(bru.v_infty().has_value());
    CHECK(*bru.v_infty() == doctest::Approx(1.0 / 0.7));
    CHECK(bru.R(*bru.v_infty()) == doctest::Approx(0.0));

    auto gm = outer_reduction(ModelSpec::gm_spec(1.5, 0.01, 1.0));
    REQUIRE(gm.v_infty().has_value());
    CHECK(*gm.v_infty() == doctest::Approx(2.5));
    CHECK(std::fabs(gm.R(*gm.v_infty())) < 1e-10);
}

TEST_CASE("domain errors outside the well-posed range") {
    auto sch = outer_reduction(ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0));
    CHECK_THROWS_AS(sch.g(0.4), spikelab::domain_error);
    CHECK_THROWS_AS(sch.G(1.01), spikelab::domain_error);
}

TEST_CASE("regime classification") {
    CHECK(classify_regime(ModelSpec::schnakenberg_spec(0.2, 1.0, 0.01, 2.0)) == Regime::Replication);
    CHECK(classify_regime(ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0)) == Regime::Nucleation);
    CHECK(classify_regime(ModelSpec::schnakenberg_spec(1.5, 1.0, 0.01, 2.0)) == Regime::NoInstability);
    CHECK(classify_regime(ModelSpec::brusselator_spec(1.0, 0.7, 0.01, 2.0)) == Regime::Nucleation);
    CHECK(classify_regime(ModelSpec::brusselator_spec(1.0, 0.8, 0.01, 2.0)) == Regime::Replication);
    CHECK(classify_regime(ModelSpec::brusselator_spec(1.0, 0.3, 0.01, 2.0)) == Regime::NoInstability);
    CHECK(classify_regime(ModelSpec::gm_spec(0.5, 0.01, 1.0)) == Regime::Nucleation);
    CHECK(classify_regime(ModelSpec::gm_spec(1.5, 0.01, 1.0)) == Regime::NoInstability);
    CHECK(classify_regime(ModelSpec::gm_spec(0.0, 0.01, 1.0)) == Regime::NoInstability);

    SUBCASE("marginal flags at the boundaries") {
        double ac = critical_a_closed_form(1.0);
        CHECK(classify_regime(ModelSpec::schnakenberg_spec(ac, 1.0, 0.01, 2.0)) == Regime::Marginal);
        CHECK(classify_regime(ModelSpec::schnakenberg_spec(1.0, 1.0, 0.01, 2.0)) == Regime::Marginal);
        CHECK(classify_regime(ModelSpec::brusselator_spec(1.0, 0.5, 0.01, 2.0)) == Regime::Marginal);
        CHECK(classify_regime(ModelSpec::brusselator_spec(1.0, 0.769, 0.01, 2.0)) == Regime::Marginal);
        CHECK(classify_regime(ModelSpec::gm_spec(1.0, 0.01, 1.0)) == Regime::Marginal);
    }
}

TEST_CASE("closed-form a_c") {
    double ac = critical_a_closed_form(1.0, 1.347);
    CHECK(ac == doctest::Approx(1.0 / (2 * 1.347 * 1.347 + 3 - 4 * std::log(2.0))).epsilon(1e-15));
    CHECK(ac == doctest::Approx(0.2594).epsilon(2e-3));
    // linear in b
    CHECK(critical_a_closed_form(2.0) == doctest::Approx(2 * critical_a_closed_form(1.0)).epsilon(1e-14));
}

TEST_CASE("physical parameter conversions") {
    auto bru = brusselator_from_physical(1.0, 1.0, 2e-4, 2.0, 1.0);
    CHECK(bru.brusselator().f == doctest::Approx(0.5));
    CHECK(bru.brusselator().a == doctest::Approx(std::pow(2.0, -1.5)));
    CHECK(bru.bigD == doctest::Approx(1.0));
    CHECK(bru.epsilon == doctest::Approx(0.01));

    auto tz = brusselator_from_tau_form(0.01, 0.02, 0.001, 0.95);
    CHECK(tz.bigD == doctest::Approx(20.0));
    CHECK(tz.brusselator().a == doctest::Approx(std::sqrt(10.0)));

    // B -> 0 gives f -> 0
    auto small = brusselator_from_physical(1.0, 1e-9, 1e-6, 1.0, 1.0);
    CHECK(small.brusselator().f == doctest::Approx(0.0).epsilon(1e-8));

    auto gm1 = gm_from_physical(0.01, 0.01, 0.02, 0.02, 0.001, 0.01, 1.0);
    CHECK(gm1.gm().tau == doctest::Approx(0.5));
    CHECK(gm1.gm().kappa == doctest::Approx(0.1));
    CHECK(gm1.epsilon * gm1.epsilon / gm1.bigD == doctest::Approx(0.02));

    // second conversion follows the nondimensionalization formulas exactly
    auto gm2 = gm_from_physical(0.5, 1.0, 1.0, 1.0, 0.005, 0.01, 1.0);
    CHECK(gm2.gm().tau == doctest::Approx(0.5));
    CHECK(gm2.gm().kappa == doctest::Approx(0.005));
    CHECK(gm2.epsilon * gm2.epsilon == doctest::Approx(0.02));

    auto gm0 = gm_from_physical(0.01, 0.01, 0.02, 0.02, 0.0, 0.01, 1.0);
    CHECK(gm0.gm().kappa == 0.0);

    SUBCASE("classification is conversion-invariant") {
        auto direct = ModelSpec::brusselator_spec(tz.brusselator().a, 0.95, tz.epsilon, tz.bigD);
        CHECK(classify_regime(tz) == classify_regime(direct));
        auto gdirect = ModelSpec::gm_spec(gm1.gm().kappa, gm1.epsilon, gm1.bigD, gm1.gm().tau);
        CHECK(classify_regime(gm1) == classify_regime(gdirect));
    }
}

TEST_CASE("ModelSpec JSON round trip") {
    auto m = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.01, 2.0);
    auto j = m.to_json();
    auto back = ModelSpec::from_json(j);
    CHECK(back.to_json() == j);
    CHECK(back.schnakenberg().a == doctest::Approx(0.2));

    auto jg = ModelSpec::gm_spec(0.5, 0.01, 1.0, 2.0).to_json();
    CHECK(ModelSpec::from_json(jg).gm().tau == doctest::Approx(2.0));

    SUBCASE("unknown fields rejected") {
        j["extra"] = 1;
        CHECK_THROWS_AS(ModelSpec::from_json(j), spikelab::config_error);
    }
    SUBCASE("bad parameters rejected") {
        CHECK_THROWS_AS(ModelSpec::brusselator_spec(1.0, 1.0, 0.01, 2.0), spikelab::config_error);
        CHECK_THROWS_AS(ModelSpec::brusselator_spec(1.0, 0.0, 0.01, 2.0), spikelab::config_error);
        CHECK_THROWS_AS(ModelSpec::gm_spec(-0.1, 0.01, 1.0), spikelab::config_error);
    }
    SUBCASE("semi-strong ratio warning") {
        auto w = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.8, 1.0).validate();
        REQUIRE(w.size() == 1);
    }
}
