// Serial vs parallel timing for the sweep-level kernels: the Brusselator
// fold table, the stability scan along a core branch, and PDE operator
// assembly.

#include <chrono>
#include <cstdio>
#include <vector>

#include "spikelab/core.hpp"
#include "spikelab/outer.hpp"
#include "spikelab/parallel.hpp"
#include "spikelab/rd_system.hpp"
#include "spikelab/spectrum.hpp"

using namespace spikelab;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double timed(F&& f) {
    auto t0 = Clock::now();
    f();
    return seconds_since(t0);
}

} // namespace

int main() {
    int hw = num_threads();
    std::printf("spikelab-bench: serial reference vs %d threads\n\n", hw);

    {
        std::vector<double> fg;
        for (double f = 0.58; f < 0.95; f += 0.045) fg.push_back(f);
        core::GridSpec grid{20.0, 2001};
        set_num_threads(1);
        double ts = timed([&] { core::bc_table(fg, grid); });
        set_num_threads(hw);
        double tp = timed([&] { core::bc_table(fg, grid); });
        std::printf("bc_table (%zu folds)          serial %6.2fs  parallel %6.2fs  speedup %.2fx\n",
                    fg.size(), ts, tp, ts / tp);
    }
    {
        auto branch = core::continue_core_branch(models::ModelKind::Schnakenberg, std::nullopt,
                                                 {0.9, 0}, {}, core::GridSpec{16.0, 1601});
        set_num_threads(1);
        double ts = timed([&] { spectrum::stability_scan(branch, 16); });
        set_num_threads(hw);
        double tp = timed([&] { spectrum::stability_scan(branch, 16); });
        std::printf("stability scan (16 points)  serial %6.2fs  parallel %6.2fs  speedup %.2fx\n",
                    ts, tp, ts / tp);
    }
    {
        auto m = models::ModelSpec::schnakenberg_spec(0.5, 1.0, 0.01, 2.0);
        rd::Assembly asm_(m, 32768);
        std::vector<double> z(2 * asm_.N, 1.0), F;
        numerics::BlockTridiag J(asm_.N);
        auto kernel = [&] {
            for (int rep = 0; rep < 400; ++rep) {
                asm_.rhs(z, 2.0, F);
                asm_.newton_matrix(z, 2.0, 1.0, J);
            }
        };
        set_num_threads(1);
        double ts = timed(kernel);
        set_num_threads(hw);
        double tp = timed(kernel);
        std::printf("operator assembly (n=32768) serial %6.2fs  parallel %6.2fs  speedup %.2fx\n",
                    ts, tp, ts / tp);
    }
    return 0;
}
