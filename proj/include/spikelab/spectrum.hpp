#pragma once

#include <complex>
#include <string>
#include <vector>

#include "spikelab/core.hpp"

namespace spikelab::spectrum {

using core::CoreBranch;
using core::CoreSolution;

/// Eigenpairs of the linearized core problem at one branch point. The
/// inhibitor perturbation N0 solves its lambda-free equation with Neumann
/// far-field (the c0 = 0 condition); its additive normalization is fixed by
/// the discrete solve, not a physical output.
struct EigenResult {
    std::vector<std::complex<double>> eigenvalues; // descending real part
    struct Mode {
        std::vector<double> Phi0, N0; // real parts, max-normalized
    };
    std::vector<Mode> modes; // for the leading min(n_eigs, 4) real eigenvalues
    double B = 0, beta = 0;
    std::vector<double> residuals; // coupled-problem residual per eigenvalue
    std::string note = "lambda = O(1) spectrum; O(eps) drift modes are outside this set's interpretation";
};

enum class EigMethod { Auto, DenseSchur, ShiftInvert };

/// Rightmost eigenvalues of the coupled linearization at `sol`. Dense path:
/// eliminate N0 through its lambda-free equation (Schur complement) and QR
/// the reduced operator. Iterative path: shift-invert Arnoldi on the coupled
/// pencil with the mass acting on Phi0 only.
EigenResult core_spectrum(const CoreSolution& sol, int n_eigs, EigMethod method = EigMethod::Auto);

struct ScanPoint {
    double beta = 0, B = 0;
    double re_lambda_max = 0;
};

/// Re(lambda_max) along a core branch; points are computed independently in
/// parallel. Requires at least 10 samples.
std::vector<ScanPoint> stability_scan(const CoreBranch& branch, int max_points = 60);

/// Max-norm residual of the coupled discrete eigenproblem for a candidate
/// pair (Phi0, N0) at eigenvalue lambda (both fields on sol's grid). Used to
/// check constructions like (V0_beta, U0_beta) at the fold.
double coupled_eigen_residual(const CoreSolution& sol, const std::vector<double>& Phi0,
                              const std::vector<double>& N0, double lambda);

void save_modes_csv(const EigenResult& r, const std::vector<double>& y, const std::string& path);
nlohmann::json eigenresult_to_json(const EigenResult& r);

} // namespace spikelab::spectrum
