#pragma once

#include <vector>

#include "spikelab/models.hpp"
#include "spikelab/numerics/block_tridiag.hpp"

namespace spikelab::rd {

using models::ModelKind;
using models::ModelSpec;

/// Shared spatial assembly of the Lagrangian RD systems on x in [-1,1]:
/// n intervals, n+1 nodes, fields interleaved (v_i, u_i), ghost-node Neumann
/// ends. Time stepping and steady/arclength solves build on the same
/// operators so steady states seed simulations bit-compatibly.
struct Assembly {
    ModelSpec model;
    int n;  // intervals
    int N;  // nodes
    double h;
    bool dilution = false;
    double rho = 0;

    Assembly(const ModelSpec& m, int intervals, bool dil = false, double growth = 0)
        : model(m), n(intervals), N(intervals + 1), h(2.0 / intervals), dilution(dil), rho(growth) {}

    double mass(int row) const {
        if (model.kind == ModelKind::GM && (row & 1)) return model.gm().tau;
        return 1.0;
    }

    /// F(z, L) with M dz/dt = F.
    void rhs(const std::vector<double>& z, double L, std::vector<double>& F) const;

    /// J = shift*M - dF/dz (shift = 0 gives the steady Jacobian -dF... with
    /// sign flipped; callers use shift a0/dt for implicit steps).
    void newton_matrix(const std::vector<double>& z, double L, double shift,
                       numerics::BlockTridiag& J) const;

    /// dF/dL (only the diffusion terms depend on L: d(eps_L^2)/dL = -2 eps_L^2/L).
    void rhs_L_derivative(const std::vector<double>& z, double L, std::vector<double>& FL) const;

    /// Double-precision rounding floor of the residual max-norm: the
    /// Laplacian sums cancel to O(ulp(field)) before the 1/h^2 scaling, so
    /// absolute residuals below this are unreachable (GM inhibitor fields at
    /// fine grids sit around 1e-8).
    double residual_floor(const std::vector<double>& z, double L) const;
};

std::vector<double> x_grid(int n);

/// Composite quasi-equilibrium state: equidistant spikes at `positions`
/// (canonical half-cell ell = 2/m for m half-spikes), inner core/homoclinic
/// profiles matched to the outer field from the asymptotic solve at (L, ell).
std::vector<double> composite_state(const ModelSpec& model, double L, int n,
                                    const std::vector<double>& positions, double ell);

} // namespace spikelab::rd
