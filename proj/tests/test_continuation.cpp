#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <filesystem>

#include "spikelab/continuation.hpp"
#include "spikelab/errors.hpp"
#include "spikelab/outer.hpp"

using namespace spikelab;
using namespace spikelab::continuation;
using models::ModelKind;
using models::ModelSpec;

namespace {
// eps=0.04, D=4 keeps the spatial grids small in unit tests
const ModelSpec fast_nuc = ModelSpec::schnakenberg_spec(0.5, 1.0, 0.04, 4.0);
const ModelSpec fast_rep = ModelSpec::schnakenberg_spec(0.2, 1.0, 0.04, 4.0);
const ModelSpec fast_none = ModelSpec::schnakenberg_spec(1.5, 1.0, 0.04, 4.0);
} // namespace

TEST_CASE("homogeneous steady states solve trivially") {
    int n = 256;
    // Schnakenberg a>b: v = a+b, u = (v-a)/v^2
    double v = 2.5, u = (v - 1.5) / (v * v);
    std::vector<double> z(2 * (n + 1));
    for (int i = 0; i <= n; ++i) {
        z[2 * i] = v;
        z[2 * i + 1] = u;
    }
    auto st = steady_solve(fast_none, 2.0, n, z);
    CHECK(st.residual < 1e-9);
    CHECK(st.measure_mu() == doctest::Approx(2.5));

    // GM kappa=1.5: A = 1+kappa, H = A^2
    auto gm = ModelSpec::gm_spec(1.5, 0.04, 4.0);
    for (int i = 0; i <= n; ++i) {
        z[2 * i] = 2.5;
        z[2 * i + 1] = 6.25;
    }
    auto stg = steady_solve(gm, 2.0, n, z);
    CHECK(stg.measure_mu() == doctest::Approx(2.5));
}

TEST_CASE("one-spike steady state matches the asymptotic boundary value") {
    int n = 1024;
    double L = 1.6;
    auto st = steady_solve_pattern(fast_nuc, L, n, 2, false);
    CHECK(st.residual < 1e-9);
    auto qe = outer::solve_quasi_equilibrium(fast_nuc, 1, L);
    CHECK(std::fabs(st.measure_mu() - qe.mu) / qe.mu < 0.05);

    SUBCASE("solution stays even; symmetry-restricted solve agrees") {
        CHECK(st.even_asymmetry() < 1e-8);
        auto st_sym = steady_solve(fast_nuc, L, n, rd::composite_state(fast_nuc, L, n, {0.0}, 1.0),
                                   true);
        double diff = 0;
        for (std::size_t i = 0; i < st.z.size(); ++i)
            diff = std::max(diff, std::fabs(st.z[i] - st_sym.z[i]));
        CHECK(diff < 1e-8);
    }
}

TEST_CASE("nucleation-regime branch folds near the asymptotic threshold") {
    int n = 1024;
    auto thr = outer::nucleation_threshold(fast_nuc, 1);
    auto start = steady_solve_pattern(fast_nuc, 0.75 * thr.L_crit, n, 2, false);
    ContinueOptions opts;
    opts.L_min = 0.5;
    opts.L_max = 6.0;
    opts.stability_stride = 3;
    auto br = continue_in_L(fast_nuc, start, +1, opts);
    REQUIRE(!br.folds.empty());
    CHECK(std::fabs(br.folds[0].L - thr.L_crit) / thr.L_crit < 0.05);

    SUBCASE("stability flips from stable to unstable across the fold") {
        int fold_idx = br.folds[0].point_index;
        bool saw_stable = false, saw_unstable = false;
        for (int i = 0; i < fold_idx - 1; ++i)
            if (br.points[i].stability == Stability::Stable) saw_stable = true;
        for (std::size_t i = fold_idx + 2; i < br.points.size(); ++i)
            if (br.points[i].stability == Stability::Unstable) saw_unstable = true;
        CHECK(saw_stable);
        CHECK(saw_unstable);
    }
    SUBCASE("an eigenvalue crosses zero at the fold") {
        auto eigs = branch_stability(*br.points[br.folds[0].point_index].state);
        CHECK(std::fabs(eigs[0].real()) < 2e-2);
    }
    SUBCASE("mu measure is monotone along the lower branch to the fold") {
        int fold_idx = br.folds[0].point_index;
        for (int i = 1; i < fold_idx; ++i)
            CHECK(br.points[i].measure_mu >= br.points[i - 1].measure_mu - 1e-9);
    }
}

TEST_CASE("replication-regime branch folds near the replication threshold") {
    int n = 1024;
    auto thr = outer::replication_threshold(fast_rep, 1);
    auto start = steady_solve_pattern(fast_rep, 0.75 * thr.L_crit, n, 2, false);
    ContinueOptions opts;
    opts.L_min = 0.5;
    opts.L_max = 6.0;
    opts.compute_stability = false;
    auto br = continue_in_L(fast_rep, start, +1, opts);
    REQUIRE(!br.folds.empty());
    CHECK(std::fabs(br.folds[0].L - thr.L_crit) / thr.L_crit < 0.05);
}

TEST_CASE("no fold when a homogeneous state exists") {
    int n = 512;
    auto start = steady_solve_pattern(fast_none, 1.0, n, 2, false);
    ContinueOptions opts;
    opts.L_min = 0.5;
    opts.L_max = 6.0;
    opts.compute_stability = false;
    opts.max_points = 300;
    auto br = continue_in_L(fast_none, start, +1, opts);
    CHECK(br.folds.empty());
    CHECK(br.points.back().L > 5.9); // walked the whole window
}

TEST_CASE("atlas builds one branch per half-spike count") {
    int n = 768;
    auto atlas = multi_branch_atlas(fast_rep, 1.0, 6.5, 4, n,
                                    [] {
                                        ContinueOptions o;
                                        o.compute_stability = false;
                                        o.max_points = 220;
                                        return o;
                                    }());
    REQUIRE(atlas.branches.size() == 4);
    for (const auto& br : atlas.branches) CHECK(!br.points.empty());

    // m=2 is the single interior spike; its fold sits near L1_rep
    auto thr = outer::replication_threshold(fast_rep, 1);
    const auto& b2 = atlas.branches[1];
    REQUIRE(!b2.folds.empty());
    CHECK(std::fabs(b2.folds[0].L - thr.L_crit) / thr.L_crit < 0.05);
    // m=4 interior-centered: two spikes, fold near 2 L1_rep
    const auto& b4 = atlas.branches[3];
    REQUIRE(!b4.folds.empty());
    CHECK(std::fabs(b4.folds[0].L - 2 * thr.L_crit) / (2 * thr.L_crit) < 0.05);

    SUBCASE("exports") {
        auto dir = (std::filesystem::temp_directory_path() / "spikelab_atlas_test").string();
        save_atlas(atlas, dir);
        CHECK(std::filesystem::exists(dir + "/atlas.json"));
        CHECK(std::filesystem::exists(dir + "/m2_interior.csv"));
    }
}

TEST_CASE("fold L converges at second order; Richardson extrapolation reported") {
    auto thr = outer::nucleation_threshold(fast_nuc, 1);
    auto fe = fold_richardson(fast_nuc, 2, false, 1024, thr.L_crit);
    // refinement moves the fold by less than the coarse-grid error, in the
    // same direction, and the extrapolated value sits beyond L_n
    double coarse_err = std::fabs(fe.L_half - fe.L_extrapolated);
    double fine_err = std::fabs(fe.L_n - fe.L_extrapolated);
    CHECK(fine_err < coarse_err);
    CHECK(std::fabs(fe.L_extrapolated - thr.L_crit) / thr.L_crit < 0.05);
}

TEST_CASE("overlay merges trajectory and branches") {
    pde::SimConfig cfg;
    cfg.model = fast_rep;
    cfg.rho = 0.0016;
    cfg.L0 = 1.0;
    cfg.L_end = 1.3;
    cfg.n = 512;
    auto traj = pde::simulate_growing(cfg);
    Atlas atlas;
    atlas.model = fast_rep;
    auto ov = overlay(traj, atlas);
    CHECK(ov.rows.size() == traj.l2_series.size());
    CHECK(ov.rows.front().source == "trajectory");
    auto dir = std::filesystem::temp_directory_path() / "spikelab_overlay_test";
    std::filesystem::create_directories(dir);
    save_overlay_csv(ov, (dir / "overlay.csv").string());
    CHECK(std::filesystem::exists(dir / "overlay.csv"));
}
