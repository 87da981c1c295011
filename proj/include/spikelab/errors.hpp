#pragma once

#include <stdexcept>
#include <string>

namespace spikelab {

/// Base class for every failure the library reports. `kind()` is the stable
/// machine-readable tag the CLI puts into its error JSON.
class error : public std::runtime_error {
public:
    error(std::string kind, const std::string& msg)
        : std::runtime_error(msg), kind_(std::move(kind)) {}
    const std::string& kind() const { return kind_; }

private:
    std::string kind_;
};

struct config_error : error {
    explicit config_error(const std::string& m) : error("ConfigError", m) {}
};

struct domain_error : error {
    explicit domain_error(const std::string& m) : error("DomainError", m) {}
};

struct newton_diverged : error {
    explicit newton_diverged(const std::string& m) : error("NewtonDiverged", m) {}
};

struct no_solution : error {
    explicit no_solution(const std::string& m) : error("NoSolution", m) {}
};

struct step_failure : error {
    explicit step_failure(const std::string& m) : error("StepFailure", m) {}
};

struct tail_not_linear : error {
    explicit tail_not_linear(const std::string& m) : error("TailNotLinear", m) {}
};

struct singular_slave_operator : error {
    explicit singular_slave_operator(const std::string& m) : error("SingularSlaveOperator", m) {}
};

struct quadrature_failure : error {
    explicit quadrature_failure(const std::string& m) : error("QuadratureFailure", m) {}
};

/// Carries which constraint killed the quasi-equilibrium solve: "mu_max"
/// (outer fold, nucleation side) or "B_c" (core fold, replication side).
struct no_quasi_equilibrium : error {
    no_quasi_equilibrium(std::string constraint, const std::string& m)
        : error("NoQuasiEquilibrium", m), failed_constraint(std::move(constraint)) {}
    std::string failed_constraint;
};

struct regime_mismatch : error {
    explicit regime_mismatch(const std::string& m) : error("RegimeMismatch", m) {}
};

struct bracket_failure : error {
    explicit bracket_failure(const std::string& m) : error("BracketFailure", m) {}
};

struct prefactor_out_of_range : error {
    explicit prefactor_out_of_range(const std::string& m) : error("PrefactorOutOfRange", m) {}
};

struct step_size_underflow : error {
    explicit step_size_underflow(const std::string& m) : error("StepSizeUnderflow", m) {}
};

struct resolution_exceeded : error {
    explicit resolution_exceeded(const std::string& m) : error("ResolutionExceeded", m) {}
};

struct eig_solver_failure : error {
    explicit eig_solver_failure(const std::string& m) : error("EigSolverFailure", m) {}
};

struct io_error : error {
    explicit io_error(const std::string& m) : error("IoError", m) {}
};

} // namespace spikelab
