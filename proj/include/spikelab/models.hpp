#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace spikelab::models {

enum class ModelKind { Schnakenberg, Brusselator, GM };

std::string to_string(ModelKind k);
ModelKind model_kind_from_string(const std::string& s);

struct SchnakenbergParams {
    double a = 0; // activator feed rate
    double b = 0; // substrate feed rate
};

struct BrusselatorParams {
    double a = 0;
    double f = 0; // must lie strictly inside (0,1)
};

struct GMParams {
    double kappa = 0; // activator background
    double tau = 1;   // inhibitor time constant (steady analysis is tau-independent)
};

/// One of the three RD systems together with its dimensionless inner width
/// epsilon and inhibitor diffusivity D. The semi-strong regime assumes
/// epsilon/sqrt(D) << 1; specs with epsilon/sqrt(D) >= 0.5 carry a warning.
struct ModelSpec {
    ModelKind kind = ModelKind::Schnakenberg;
    std::variant<SchnakenbergParams, BrusselatorParams, GMParams> params;
    double epsilon = 0.01;
    double bigD = 1.0;

    const SchnakenbergParams& schnakenberg() const { return std::get<SchnakenbergParams>(params); }
    const BrusselatorParams& brusselator() const { return std::get<BrusselatorParams>(params); }
    const GMParams& gm() const { return std::get<GMParams>(params); }

    double eps_over_sqrtD() const;
    /// Throws config_error on out-of-range parameters; returns warnings
    /// (e.g. the semi-strong ratio flag) without failing.
    std::vector<std::string> validate() const;

    nlohmann::json to_json() const;
    static ModelSpec from_json(const nlohmann::json& j);

    static ModelSpec schnakenberg_spec(double a, double b, double epsilon, double D);
    static ModelSpec brusselator_spec(double a, double f, double epsilon, double D);
    static ModelSpec gm_spec(double kappa, double epsilon, double D, double tau = 1.0);
};

/// Closed-form evaluators of the scalar outer problem
///   D_L (g(v) v_x)_x = R(v),
/// its first integral G with G' = -R*g, and the well-posedness window.
/// For the GM model "v" stands for the activator field and g is the mobility
/// written there in terms of the inhibitor elimination.
class OuterReduction {
public:
    OuterReduction(ModelKind kind, double a_or_kappa, double b_or_f);

    double g(double xi) const;
    double R(double xi) const;
    double Rprime(double xi) const;
    double G(double xi) const;
    double Gprime(double xi) const;
    /// G(hi) - G(lo) evaluated stably: narrow intervals integrate G' by
    /// Gauss quadrature instead of differencing nearly equal values (the
    /// difference underflows catastrophically as mu -> v_infty).
    double Gdiff(double hi, double lo) const;

    double wellposed_lo() const { return lo_; }
    double wellposed_hi() const { return hi_; }
    double mu_max() const { return hi_; }
    /// Homogeneous state inside the well-posed window, when one exists
    /// (Schnakenberg a>b, Brusselator f<1/2, GM kappa>1).
    std::optional<double> v_infty() const { return v_infty_; }
    /// Upper end of the admissible mu range: v_infty when present, else 2a/2kappa.
    double mu_sup() const { return v_infty_ ? *v_infty_ : hi_; }

    ModelKind kind() const { return kind_; }

private:
    ModelKind kind_;
    double p1_, p2_; // (a,b) | (a,f) | (kappa,-)
    double lo_, hi_;
    std::optional<double> v_infty_;
    void check_domain(double xi) const;
};

OuterReduction outer_reduction(const ModelSpec& model);

enum class Regime { Replication, Nucleation, NoInstability, Marginal };

std::string to_string(Regime r);

/// Critical constants classify_regime needs from the core problem. The
/// defaults are the tabulated values; module `outer` can rebuild them from a
/// freshly computed fold table.
struct RegimeThresholds {
    double Bc_schnakenberg = 1.347;
    double fc_brusselator = 0.769;
    /// Relative half-width of the Marginal band around the deciding value.
    double marginal_band = 1e-3;
};

/// Predicts which spike-generating mechanism occurs as L grows.
/// Schnakenberg: NoInstability for a>b, Replication for a<a_c(b),
/// Nucleation between. Brusselator: NoInstability f<1/2, Nucleation
/// 1/2<f<f_c, Replication f_c<f<1. GM: Nucleation iff 0<kappa<1.
/// Values within the marginal band of a boundary return Regime::Marginal.
Regime classify_regime(const ModelSpec& model, const RegimeThresholds& th = {});

/// a_c(b) from the closed-form relation a_c = b/(2 B_c^2 + 3 - 4 log 2).
double critical_a_closed_form(double b, double Bc = 1.347);

/// Dimensionless Brusselator spec from the physical rate constants
/// (a = E/(B+1)^{3/2}, f = B/(B+1), D = D_u/((B+1)L^2), eps^2 = D_v/((B+1)L^2)).
ModelSpec brusselator_from_physical(double E, double B, double D_v, double D_u, double L);

/// Brusselator spec from the tau-scaled variant
///   V_t = eps^2 V_xx + eps - V + f U V^2, tau U_t = D_u U_xx + (V - U V^2)/eps,
/// for which a = sqrt(eps/tau) and D = D_u/tau.
ModelSpec brusselator_from_tau_form(double eps, double D_u, double tau, double f);

/// Dimensionless GM spec from physical constants
/// (tau = mu_a/mu_h, D = D_h/mu_h, eps^2 = D_a/mu_a, kappa = delta_a nu_h/(mu_h nu_a)).
ModelSpec gm_from_physical(double mu_a, double nu_a, double mu_h, double nu_h,
                           double delta_a, double D_a, double D_h);

} // namespace spikelab::models
