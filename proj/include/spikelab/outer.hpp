#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "spikelab/core.hpp"
#include "spikelab/models.hpp"

namespace spikelab::outer {

using models::ModelKind;
using models::ModelSpec;
using models::OuterReduction;
using models::Regime;

/// Whether v(0+) carries the O(eps/sqrt(D)) far-field correction through the
/// core constant C(B), or stays at its leading-order value (a or the GM
/// homoclinic background). Corrected is the default; LeadingOrder reproduces
/// the closed-form limits.
enum class V0Mode { Corrected, LeadingOrder };

/// chi(mu) in its integrated-by-parts (proper) form: boundary term
/// -2 sqrt(G(mu)-G(v0))/R(v0) plus a regular integral. Absolute quadrature
/// tolerance 1e-10 by default.
double chi(const OuterReduction& red, double mu, double v0plus, double abs_tol = 1e-10);
double chi(const ModelSpec& model, double mu, double v0plus);

/// Partial chi up to w <= mu (the profile integral chi[v(x)] with the fixed
/// boundary value mu inside the square roots).
double chi_partial(const OuterReduction& red, double w, double mu, double v0plus,
                   double abs_tol = 1e-10);

/// Far-field data the outer solves pull from the core problem: the fold B_c
/// and C(B) along the primary branch. Built once per (kind, f) and cached
/// process-wide; harmless to share across threads after construction.
std::shared_ptr<const core::CoreTables> core_tables(ModelKind kind, double f = 0.0);

/// Brusselator fold table B_c(f) on the default f grid (cached).
const std::vector<core::BcEntry>& brusselator_fold_table();

/// classify_regime backed by computed core constants instead of the
/// tabulated defaults.
models::RegimeThresholds computed_thresholds();
Regime classify(const ModelSpec& model);

struct OuterSolve {
    double mu = 0;     // boundary value v(ell) (A(ell) for GM)
    double B = 0;      // matched far-field slope (0 for GM)
    double v0plus = 0; // v(0+) (A(0+) for GM)
    double H0L = 0;    // GM only: H0/eps_L
    double ell = 0;    // canonical half-interval 1/K
    double D_L = 0;    // D/L^2
    bool converged = false;
    std::string regime_hit; // active constraint when a solve fails upstream
    double residual = 0;    // max-norm of the matching system at the solution
};

/// Solves the coupled inner/outer matching system at domain half-length L
/// with K equidistant spikes (ell = 1/K). Throws no_quasi_equilibrium with
/// the failed constraint ("mu_max" or "B_c") beyond the thresholds.
OuterSolve solve_quasi_equilibrium(const ModelSpec& model, int K, double L,
                                   V0Mode v0mode = V0Mode::Corrected);
/// Same system on an arbitrary canonical half-interval (used for boundary
/// and mixed spike patterns where ell = 2/m for m half-spikes).
OuterSolve solve_quasi_equilibrium_ell(const ModelSpec& model, double ell, double L,
                                       V0Mode v0mode = V0Mode::Corrected);

struct ThresholdResult {
    int K = 1;
    Regime kind = Regime::Replication;
    double D_L_crit = 0;
    double L_crit = 0;
    double mu_at_crit = 0;
    double B_at_crit = 0;
    double H0L_at_crit = 0; // GM only
    enum class Method { Full, SmallParam } method = Method::Full;

    nlohmann::json to_json() const;
};

/// Critical length for spike self-replication: B pinned at the core fold
/// B_c, mu < mu_max recovered from the first-integral relation.
ThresholdResult replication_threshold(const ModelSpec& model, int K,
                                      V0Mode v0mode = V0Mode::Corrected);

/// Critical length for spike nucleation: mu pinned at mu_max (2a or
/// 2 kappa); for GM the matching condition is first solved for H0L there.
ThresholdResult nucleation_threshold(const ModelSpec& model, int K,
                                     V0Mode v0mode = V0Mode::Corrected);

enum class CriticalAMode { Full, ClosedForm };

/// Threshold a_c(b) separating replication from nucleation for the
/// Schnakenberg model. Full mode solves the first-integral relation at
/// B = B_c, mu = 2a with the corrected v(0+); closed form is
/// b/(2 B_c^2 + 3 - 4 log 2).
double critical_a(double b, double eps_over_sqrtD, CriticalAMode mode);

/// Brusselator threshold f_c: root of B_c(f)^2 f^2/2 = -3/4 + f + (1-f)log 2
/// with B_c(f) interpolated from the fold table; independent of a.
double critical_f(const std::vector<core::BcEntry>* table = nullptr);

/// Closed-form small-a replication thresholds (Schnakenberg and
/// Brusselator). Throws prefactor_out_of_range when the atanh argument
/// leaves (0,1) and regime_mismatch outside the replication regime.
ThresholdResult small_param_threshold(const ModelSpec& model, int K);

struct GmH0Estimate {
    double H0 = 0;  // inner constant, H0 ~ sqrt(D_L)/3 tanh(ell/sqrt(D_L))
    double H0L = 0; // H(0) = H0/eps_L
};

/// Small-kappa closed form for the GM inhibitor level (no nucleation
/// threshold exists in this limit).
GmH0Estimate small_param_h0(const ModelSpec& model, int K, double L);

struct NorepBound {
    double B_max = 0;
    double Bc_reference = 0; // core fold the bound is compared against
    bool no_replication = false;
};

/// Lemma-style no-replication bounds: Schnakenberg b<a gives
/// B_max = sqrt(2 log 2 - 1); Brusselator f<1/2 gives B_max = 1.
NorepBound norep_bound(const ModelSpec& model);

/// The bound curves themselves (exposed for the lemma checks).
double F_s(double z); // sqrt(2) (-1 + 1/z + log z)^{1/2} on 1 < z < 2
double F_b(double f); // sqrt(2) [(1-f)/f^2 (-f - log(1-f))]^{1/2} on 0 < f < 1/2

/// Outer profile v(x) on 0 <= x <= ell by inverting chi[v(x)] = sqrt(2/D_L) x.
std::vector<double> outer_profile(const ModelSpec& model, const OuterSolve& solve,
                                  const std::vector<double>& x_grid);

struct PhaseDiagram {
    ModelKind family;
    std::vector<double> xs, ys; // cell centers: (b, a) Schnakenberg, (a, f) Brusselator
    std::vector<Regime> cells;  // row-major, ys outer
    struct Curve {
        std::string name;
        std::vector<std::pair<double, double>> points;
    };
    std::vector<Curve> boundaries;
};

/// Regime map over a parameter grid with the boundary curves a_c(b) (full
/// solve) / f_c and the no-instability lines a=b / f=1/2.
PhaseDiagram phase_diagram(ModelKind family, int nx, int ny, double x_lo, double x_hi,
                           double y_lo, double y_hi, double eps_over_sqrtD);

void save_phase_diagram_csv(const PhaseDiagram& pd, const std::string& path);
void save_phase_diagram_svg(const PhaseDiagram& pd, const std::string& path);

} // namespace spikelab::outer
