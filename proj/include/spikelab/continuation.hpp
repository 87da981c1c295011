#pragma once

#include <complex>
#include <memory>
#include <string>
#include <vector>

#include "spikelab/pde.hpp"
#include "spikelab/rd_system.hpp"

namespace spikelab::continuation {

using models::ModelKind;
using models::ModelSpec;

/// A converged steady state of the Lagrangian system at half-length L.
struct SteadyState {
    ModelSpec model;
    int n = 0; // intervals
    double L = 0;
    std::vector<double> z; // interleaved (v_i, u_i)
    double residual = 0;   // max-norm of F at the state

    double v(int i) const { return z[2 * i]; }
    double u(int i) const { return z[2 * i + 1]; }
    double measure_mu() const { return z[2 * n]; }               // v(1)
    double measure_u0v0() const;                                 // center node
    double l2norm_v() const;
    double even_asymmetry() const; // max |v(x) - v(-x)|
};

/// Damped Newton to residual max-norm < 1e-9 from the given initial field.
/// `symmetrize` projects the iterates onto even functions of x (the
/// symmetry-restricted variant used by the reflection invariance check).
SteadyState steady_solve(const ModelSpec& model, double L, int n, std::vector<double> z_init,
                         bool symmetrize = false);

/// Composite asymptotic initial state for an equidistant pattern given as
/// half-spike count m (spacing 4/m on the reflection-extended line):
/// odd m is boundary-anchored by necessity; even m picks interior-centered
/// or boundary-anchored via `boundary_phase`.
std::vector<double> pattern_positions(int half_spikes, bool boundary_phase);
SteadyState steady_solve_pattern(const ModelSpec& model, double L, int n, int half_spikes,
                                 bool boundary_phase);

enum class Stability { Stable, Unstable, Unknown };

struct BranchPoint {
    double L = 0;
    double measure_mu = 0, measure_u0v0 = 0, l2norm_v = 0;
    Stability stability = Stability::Unknown;
    double lambda_max_re = 0;
    bool is_fold = false;
    std::shared_ptr<const SteadyState> state;
};

struct BifurcationCandidate {
    double L = 0;
    int point_index = 0;
    bool at_fold = false;     // determinant flip coincides with a dL/ds sign change
    std::string diagnostics;  // Jacobian determinant parity across the candidate
};

struct SteadyBranch {
    std::string branch_id;
    int half_spikes = 2;
    std::vector<BranchPoint> points; // ordered along the arclength walk
    struct Fold {
        double L = 0;
        int point_index = 0;
    };
    std::vector<Fold> folds;
    std::vector<BifurcationCandidate> candidates; // det sign changes incl. folds
    std::vector<std::string> notes;
};

struct ContinueOptions {
    double ds0 = 0.02;
    double ds_max = 0.08;
    double ds_min = 1e-8;
    int max_points = 400;
    double L_min = 0.2, L_max = 8.0;
    bool compute_stability = true;
    int stability_stride = 1; // evaluate eigenvalues every k-th point
};

/// Pseudo-arclength continuation in (z, L) with solution components weighted
/// by their branch-local RMS. Folds are sign changes of dL/ds, refined with
/// parabolic fits to |dL| < 1e-3; the walk continues through them onto
/// middle/unstable branches until a limit is hit.
SteadyBranch continue_in_L(const ModelSpec& model, const SteadyState& start, int direction,
                           const ContinueOptions& opts);

/// Rightmost eigenvalues of the full linearization at a steady point
/// (generalized with the tau mass for GM). Near-zero drift modes
/// (|lambda| < 1e-4 eps) are excluded from the stability verdict.
std::vector<std::complex<double>> branch_stability(const SteadyState& state, int n_eigs = 6);
Stability stability_verdict(const std::vector<std::complex<double>>& eigs, double epsilon,
                            double* lambda_max_re = nullptr);

/// One branch per half-spike count m = 1..max_half_spikes over the L range;
/// per-branch failures are recorded in `notes` and skipped.
struct Atlas {
    ModelSpec model;
    std::vector<SteadyBranch> branches;
    std::vector<std::string> notes;
};

Atlas multi_branch_atlas(const ModelSpec& model, double L_lo, double L_hi, int max_half_spikes,
                         int n, ContinueOptions opts = {});

/// Fold location under spatial refinement: the fold L of the same pattern
/// at n/2 and n intervals with the second-order Richardson extrapolation.
struct FoldEstimate {
    double L_half = 0, L_n = 0, L_extrapolated = 0;
};

FoldEstimate fold_richardson(const ModelSpec& model, int half_spikes, bool boundary_phase, int n,
                             double L_hint);

/// Trajectory overlaid on branch curves: (L, ||v||_2) series for both, with
/// trajectory jump segments annotated by the detected event kind.
struct Overlay {
    struct Row {
        std::string source; // "trajectory" or branch id
        double L = 0, l2norm_v = 0;
        std::string event; // event kind at this sample, if any
    };
    std::vector<Row> rows;
};

Overlay overlay(const pde::SimTrajectory& traj, const Atlas& atlas);

void save_branch_csv(const SteadyBranch& branch, const std::string& path);
void save_atlas(const Atlas& atlas, const std::string& dir);
void save_overlay_csv(const Overlay& ov, const std::string& path);

} // namespace spikelab::continuation
