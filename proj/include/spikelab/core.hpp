#pragma once

#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "spikelab/models.hpp"
#include "spikelab/numerics/interp.hpp"

namespace spikelab::core {

using models::ModelKind;

struct GridSpec {
    double y_max = 0; // 0 = per-model default (16 Schnakenberg, 20 Brusselator)
    int n = 0;        // grid nodes on [0, y_max]; 0 = default density (200/unit)
};

/// Default grids: Schnakenberg decays fast enough for y_max=16; the
/// Brusselator substrate approaches its linear tail only like V ~ e^{-y}
/// (linear source term), so it gets y_max=20 at the same density.
GridSpec default_grid(models::ModelKind kind);

/// Discrete solution of the half-line core problem
///   V0'' - V0 + fc U0 V0^2 = 0,  U0'' + s(V0, U0) = 0,  y >= 0,
/// with V0y(0)=U0y(0)=0, V0(y_max)=0 and U0y(y_max)=B, where fc=1 and
/// s=-U0V0^2 for Schnakenberg, fc=f and s=V0-U0V0^2 for the Brusselator.
/// U0 ~ B y + C in the tail; beta = U0(0) V0(0).
struct CoreSolution {
    ModelKind kind = ModelKind::Schnakenberg;
    double f = 0.0; // Brusselator only
    std::vector<double> y, V0, U0;
    double B = 0.0;
    double C = 0.0;
    double beta = 0.0;
    double residual_norm = 0.0;  // max-norm of the h^2-scaled discrete residual
    double tail_deviation = 0.0; // max |U0 - B y - C| on the fit window

    int n() const { return static_cast<int>(y.size()); }
    double y_max() const { return y.back(); }
    double h() const { return y[1] - y[0]; }
};

struct CoreTarget {
    enum class Pin { B, Beta } pin = Pin::B;
    double value = 0.0;
    static CoreTarget pin_B(double v) { return {Pin::B, v}; }
    static CoreTarget pin_beta(double v) { return {Pin::Beta, v}; }
};

/// Newton solve of the discrete core problem, pinning either B (far-field
/// slope given, beta free) or beta (spike strength pinned, B recovered as a
/// bordered unknown). Throws newton_diverged / no_solution.
CoreSolution solve_core(ModelKind kind, std::optional<double> f, CoreTarget target,
                        GridSpec grid = {}, const CoreSolution* seed = nullptr);

/// Evaluates the flux identity B = int U0 V0^2 dy (Schnakenberg) or
/// B = (1-f) int U0 V0^2 dy (Brusselator) by Simpson quadrature on the grid.
double flux_quadrature(const CoreSolution& sol);

/// Near-null eigenvector of the B-pinned discrete Jacobian by inverse
/// iteration (the fold diagnostic: at B = B_c its V component aligns with
/// V0_beta). Returns the V component, max-normalized, plus the Rayleigh
/// estimate of the smallest eigenvalue.
std::pair<std::vector<double>, double> fold_null_vector_V(const CoreSolution& sol);

/// Far-field constant from the tail fit window [0.7, 0.9]*y_max:
/// C = mean(U0 - B y), second value is the max deviation from that constant.
/// Throws tail_not_linear when the deviation exceeds 1e-3.
std::pair<double, double> farfield_constant(const CoreSolution& sol);

struct BranchSample {
    double B = 0, beta = 0, C = 0;
    std::shared_ptr<const CoreSolution> solution;
};

struct FoldPoint {
    double B_c = 0, beta_c = 0;
    std::shared_ptr<const CoreSolution> solution;
};

struct StepControl {
    double dB_max = 0.01;      // B-led stepping away from the fold
    double dbeta_max = 0.0025; // beta-led stepping through the fold
    double dbeta_min = 1e-9;
    double slope_switch = 0.8; // switch to beta-led when |dbeta/dB| exceeds this
    int max_samples = 4000;
    bool stop_after_fold = false; // fold-table runs skip the volcano branch
};

/// Solution branch of the core problem traced in beta (which is strictly
/// monotone along the arclength), from near the small-B limit beta -> 3/(2 fc)
/// down through the fold onto the volcano branch.
struct CoreBranch {
    ModelKind kind = ModelKind::Schnakenberg;
    double f = 0.0;
    std::vector<BranchSample> samples; // ordered by decreasing beta
    std::optional<FoldPoint> fold;

    /// Primary-branch portion (beta >= beta_c), ordered by increasing B.
    std::vector<BranchSample> primary_samples() const;
};

CoreBranch continue_core_branch(ModelKind kind, std::optional<double> f,
                                std::pair<double, double> beta_range = {0.6, 1.55},
                                StepControl step = {}, GridSpec grid = {});

/// Interpolation tables the outer module consumes: the fold location and the
/// far-field constant along the primary branch as a function of B.
struct CoreTables {
    double Bc = 0, beta_c = 0, C_at_Bc = 0;
    numerics::Pchip C_of_B;
    double B_lo = 0; // smallest tabulated B

    /// C(B) clamped to the tabulated range (B beyond the fold uses C(Bc)).
    double C(double B) const;
};

CoreTables primary_tables(const CoreBranch& branch);

struct BcEntry {
    double f = 0, Bc = 0, Cb_at_Bc = 0;
};

/// Brusselator fold table B_c(f) with the far-field constant at the fold,
/// computed per f in parallel. Per-f continuation failures propagate.
std::vector<BcEntry> bc_table(const std::vector<double>& f_grid, GridSpec grid = {});

void save_bc_table_csv(const std::vector<BcEntry>& table, const std::string& path);
std::vector<BcEntry> load_bc_table_csv(const std::string& path);

void save_solution_csv(const CoreSolution& sol, const std::string& path);
void save_branch_csv(const CoreBranch& branch, const std::string& path);

} // namespace spikelab::core
