#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>

#include "spikelab/errors.hpp"
#include "spikelab/numerics/block_tridiag.hpp"
#include "spikelab/numerics/interp.hpp"
#include "spikelab/numerics/quadrature.hpp"
#include "spikelab/numerics/roots.hpp"
#include "spikelab/parallel.hpp"

using namespace spikelab;
using namespace spikelab::numerics;

TEST_CASE("adaptive quadrature hits smooth and cusped integrands") {
    auto r1 = integrate([](double x) { return x * x; }, 0, 1, 1e-12);
    CHECK(r1.value == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    auto r2 = integrate([](double x) { return std::sin(x); }, 0, M_PI, 1e-12);
    CHECK(r2.value == doctest::Approx(2.0).epsilon(1e-12));
    // square-root cusp at the right endpoint, the chi proper-form situation
    auto r3 = integrate([](double x) { return std::sqrt(1.0 - x); }, 0, 1, 1e-10);
    CHECK(r3.value == doctest::Approx(2.0 / 3.0).epsilon(1e-9));
    // reversed limits flip the sign
    auto r4 = integrate([](double x) { return x; }, 1, 0, 1e-12);
    CHECK(r4.value == doctest::Approx(-0.5));
}

TEST_CASE("brent finds bracketed roots") {
    double r = brent([](double x) { return std::cos(x) - x; }, 0, 1);
    CHECK(r == doctest::Approx(0.7390851332151607).epsilon(1e-12));
    CHECK_THROWS_AS(brent([](double x) { return 1.0 + x * x; }, 0, 1), bracket_failure);
    double r2 = brent_scan([](double x) { return (x - 0.25) * (x + 3.0); }, 0, 1);
    CHECK(r2 == doctest::Approx(0.25).epsilon(1e-10));
}

TEST_CASE("newton2 solves a small nonlinear system") {
    auto F = [](double x, double y) {
        return std::pair<double, double>{x * x + y - 3.0, y - 1.0};
    };
    auto r = newton2(F, 1.0, 0.0);
    CHECK(r.converged);
    CHECK(r.x == doctest::Approx(std::sqrt(2.0)).epsilon(1e-10));
    CHECK(r.y == doctest::Approx(1.0));
}

TEST_CASE("pchip reproduces linear data and stays monotone") {
    std::vector<double> x{0, 1, 2, 3, 4}, y{1, 3, 5, 7, 9};
    Pchip p(x, y);
    CHECK(p(2.5) == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(p.derivative(1.7) == doctest::Approx(2.0).epsilon(1e-12));

    std::vector<double> ym{0, 0.5, 0.8, 2.0, 2.05};
    Pchip q(x, ym);
    double prev = q(0.0);
    for (double t = 0.02; t <= 4.0; t += 0.02) {
        double v = q(t);
        CHECK(v >= prev - 1e-13);
        prev = v;
    }
}

TEST_CASE("block tridiagonal LU solves against multiply") {
    std::mt19937 rng(1234);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::size_t n = 57;
    BlockTridiag A(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (int k = 0; k < 4; ++k) {
            A.D(i)[k] = u(rng);
            if (i > 0) A.L(i)[k] = 0.3 * u(rng);
            if (i + 1 < n) A.U(i)[k] = 0.3 * u(rng);
        }
        A.D(i)[0] += 4.0; // diagonal dominance
        A.D(i)[3] += 4.0;
    }
    std::vector<double> x_true(2 * n), b(2 * n);
    for (auto& v : x_true) v = u(rng);
    A.multiply(x_true.data(), b.data());
    BlockTridiagLU lu(A);
    lu.solve(b);
    double err = 0;
    for (std::size_t i = 0; i < 2 * n; ++i) err = std::max(err, std::fabs(b[i] - x_true[i]));
    CHECK(err < 1e-11);

    SUBCASE("bordered solve") {
        std::vector<double> bb(2 * n), cc(2 * n), r(2 * n);
        for (auto& v : bb) v = u(rng);
        for (auto& v : cc) v = u(rng);
        for (auto& v : r) v = u(rng);
        double d = 2.0, q = 0.7, s = 0;
        std::vector<double> x;
        REQUIRE(solve_bordered(lu, bb, cc, d, r, q, x, s));
        // residual of the bordered system
        std::vector<double> Ax(2 * n);
        A.multiply(x.data(), Ax.data());
        double res = 0;
        for (std::size_t i = 0; i < 2 * n; ++i)
            res = std::max(res, std::fabs(Ax[i] + bb[i] * s - r[i]));
        double cx = 0;
        for (std::size_t i = 0; i < 2 * n; ++i) cx += cc[i] * x[i];
        res = std::max(res, std::fabs(cx + d * s - q));
        CHECK(res < 1e-10);
    }
}

TEST_CASE("parallel_for serial reference matches threaded run") {
    std::vector<double> serial(1000), threaded(1000);
    int saved = num_threads();
    set_num_threads(1);
    parallel_for(1000, [&](std::ptrdiff_t i) { serial[i] = std::sin(0.01 * double(i)); });
    set_num_threads(4);
    parallel_for(1000, [&](std::ptrdiff_t i) { threaded[i] = std::sin(0.01 * double(i)); });
    set_num_threads(saved);
    CHECK(serial == threaded); // bitwise: same per-index computation
}
