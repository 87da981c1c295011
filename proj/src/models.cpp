#include "spikelab/models.hpp"
#include "spikelab/errors.hpp"

#include <cmath>
#include <cstdio>

namespace spikelab::models {

namespace {
constexpr double kGmLogClamp = 1e-12; // xi >= kappa*(1+clamp) keeps log(xi-kappa) finite
}

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::Schnakenberg: return "schnakenberg";
        case ModelKind::Brusselator: return "brusselator";
        case ModelKind::GM: return "gm";
    }
    return "?";
}

ModelKind model_kind_from_string(const std::string& s) {
    if (s == "schnakenberg") return ModelKind::Schnakenberg;
    if (s == "brusselator") return ModelKind::Brusselator;
    if (s == "gm") return ModelKind::GM;
    throw config_error("unknown model kind '" + s + "'");
}

std::string to_string(Regime r) {
    switch (r) {
        case Regime::Replication: return "replication";
        case Regime::Nucleation: return "nucleation";
        case Regime::NoInstability: return "no_instability";
        case Regime::Marginal: return "marginal";
    }
    return "?";
}

double ModelSpec::eps_over_sqrtD() const { return epsilon / std::sqrt(bigD); }

std::vector<std::string> ModelSpec::validate() const {
    if (!(epsilon > 0) || !(bigD > 0)) throw config_error("epsilon and D must be positive");
    switch (kind) {
        case ModelKind::Schnakenberg: {
            const auto& p = schnakenberg();
            if (!(p.a > 0) || !(p.b > 0)) throw config_error("Schnakenberg needs a>0, b>0");
            break;
        }
        case ModelKind::Brusselator: {
            const auto& p = brusselator();
            if (!(p.a > 0)) throw config_error("Brusselator needs a>0");
            if (!(p.f > 0.0 && p.f < 1.0)) throw config_error("Brusselator needs f strictly inside (0,1)");
            break;
        }
        case ModelKind::GM: {
            const auto& p = gm();
            if (p.kappa < 0) throw config_error("GM needs kappa >= 0");
            if (!(p.tau > 0)) throw config_error("GM needs tau > 0");
            break;
        }
    }
    std::vector<std::string> warnings;
    if (eps_over_sqrtD() >= 0.5)
        warnings.push_back("epsilon/sqrt(D) = " + std::to_string(eps_over_sqrtD()) +
                           " is outside the semi-strong regime (want << 1)");
    return warnings;
}

nlohmann::json ModelSpec::to_json() const {
    nlohmann::json p;
    switch (kind) {
        case ModelKind::Schnakenberg:
            p = {{"a", schnakenberg().a}, {"b", schnakenberg().b}};
            break;
        case ModelKind::Brusselator:
            p = {{"a", brusselator().a}, {"f", brusselator().f}};
            break;
        case ModelKind::GM:
            p = {{"kappa", gm().kappa}, {"tau", gm().tau}};
            break;
    }
    return {{"kind", to_string(kind)}, {"params", p}, {"epsilon", epsilon}, {"D", bigD}};
}

ModelSpec ModelSpec::from_json(const nlohmann::json& j) {
    for (auto& [key, _] : j.items())
        if (key != "kind" && key != "params" && key != "epsilon" && key != "D")
            throw config_error("unknown ModelSpec field '" + key + "'");
    ModelSpec m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    const auto& p = j.at("params");
    switch (m.kind) {
        case ModelKind::Schnakenberg:
            m.params = SchnakenbergParams{p.at("a").get<double>(), p.at("b").get<double>()};
            break;
        case ModelKind::Brusselator:
            m.params = BrusselatorParams{p.at("a").get<double>(), p.at("f").get<double>()};
            break;
        case ModelKind::GM:
            m.params = GMParams{p.at("kappa").get<double>(),
                                p.contains("tau") ? p.at("tau").get<double>() : 1.0};
            break;
    }
    m.epsilon = j.at("epsilon").get<double>();
    m.bigD = j.at("D").get<double>();
    m.validate();
    return m;
}

ModelSpec ModelSpec::schnakenberg_spec(double a, double b, double epsilon, double D) {
    ModelSpec m;
    m.kind = ModelKind::Schnakenberg;
    m.params = SchnakenbergParams{a, b};
    m.epsilon = epsilon;
    m.bigD = D;
    m.validate();
    return m;
}

ModelSpec ModelSpec::brusselator_spec(double a, double f, double epsilon, double D) {
    ModelSpec m;
    m.kind = ModelKind::Brusselator;
    m.params = BrusselatorParams{a, f};
    m.epsilon = epsilon;
    m.bigD = D;
    m.validate();
    return m;
}

ModelSpec ModelSpec::gm_spec(double kappa, double epsilon, double D, double tau) {
    ModelSpec m;
    m.kind = ModelKind::GM;
    m.params = GMParams{kappa, tau};
    m.epsilon = epsilon;
    m.bigD = D;
    m.validate();
    return m;
}

OuterReduction::OuterReduction(ModelKind kind, double a_or_kappa, double b_or_f)
    : kind_(kind), p1_(a_or_kappa), p2_(b_or_f) {
    switch (kind_) {
        case ModelKind::Schnakenberg:
            lo_ = p1_;
            hi_ = 2.0 * p1_;
            if (p1_ > p2_) v_infty_ = p1_ + p2_; // R(a+b)=0 inside (a,2a) iff a>b
            break;
        case ModelKind::Brusselator:
            lo_ = p1_;
            hi_ = 2.0 * p1_;
            if (p2_ < 0.5) v_infty_ = p1_ / (1.0 - p2_);
            break;
        case ModelKind::GM:
            lo_ = p1_;
            hi_ = 2.0 * p1_;
            if (p1_ > 1.0) v_infty_ = 1.0 + p1_;
            break;
    }
}

void OuterReduction::check_domain(double xi) const {
    // the GM evaluators clamp xi to kappa(1+1e-12) internally, so the closed
    // end is admitted there
    bool ok = kind_ == ModelKind::GM ? (xi >= lo_ && xi <= hi_) : (xi > lo_ && xi <= hi_);
    if (!ok) {
        char buf[160];
        std::snprintf(buf, sizeof buf, "outer reduction evaluated at xi=%.17g outside (%.17g, %.17g]",
                      xi, lo_, hi_);
        throw spikelab::domain_error(buf);
    }
}

double OuterReduction::g(double xi) const {
    check_domain(xi);
    if (kind_ == ModelKind::GM) {
        double k = p1_;
        double d = std::max(xi - k, k * kGmLogClamp);
        return xi * (2.0 * k - xi) / (d * d);
    }
    double a = p1_;
    return (2.0 * a - xi) / (xi * xi * xi);
}

double OuterReduction::R(double xi) const {
    check_domain(xi);
    switch (kind_) {
        case ModelKind::Schnakenberg: return xi - p1_ - p2_;
        case ModelKind::Brusselator: return (1.0 - p2_) * xi - p1_;
        case ModelKind::GM: {
            double k = p1_;
            double d = std::max(xi - k, k * kGmLogClamp);
            return xi * xi - xi * xi / d;
        }
    }
    return 0;
}

double OuterReduction::Rprime(double xi) const {
    check_domain(xi);
    switch (kind_) {
        case ModelKind::Schnakenberg: return 1.0;
        case ModelKind::Brusselator: return 1.0 - p2_;
        case ModelKind::GM: return 2.0 * xi + g(xi);
    }
    return 0;
}

double OuterReduction::Gprime(double xi) const {
    check_domain(xi);
    return -R(xi) * g(xi);
}

double OuterReduction::G(double xi) const {
    check_domain(xi);
    switch (kind_) {
        case ModelKind::Schnakenberg: {
            double a = p1_, b = p2_;
            return -a * (a + b) / (xi * xi) + (3.0 * a + b) / xi + std::log(xi);
        }
        case ModelKind::Brusselator: {
            double a = p1_, f = p2_;
            return -a * a / (xi * xi) + a * (3.0 - 2.0 * f) / xi + (1.0 - f) * std::log(xi);
        }
        case ModelKind::GM: {
            double k = p1_;
            double d = std::max(xi - k, k * kGmLogClamp);
            return -k * k * k * k / (2.0 * d * d) + k * k * k * (k - 2.0) / d -
                   2.0 * k * k * k * std::log(d) - k * (k + 1.0) * xi + xi * xi * xi / 3.0 -
                   xi * xi / 2.0;
        }
    }
    return 0;
}

double OuterReduction::Gdiff(double hi, double lo) const {
    if (hi == lo) return 0.0;
    if (hi < lo) return -Gdiff(lo, hi);
    if (hi - lo > 0.02 * (hi_ - lo_)) return G(hi) - G(lo);
    // 10-point Gauss-Legendre of G' on the narrow interval
    static const double xg[5] = {0.148874338981631, 0.433395394129247, 0.679409568299024,
                                 0.865063366688985, 0.973906528517172};
    static const double wg[5] = {0.295524224714753, 0.269266719309996, 0.219086362515982,
                                 0.149451349150581, 0.066671344308688};
    double c = 0.5 * (hi + lo), hw = 0.5 * (hi - lo);
    double s = 0;
    for (int k = 0; k < 5; ++k) {
        s += wg[k] * (Gprime(c + hw * xg[k]) + Gprime(c - hw * xg[k]));
    }
    return s * hw;
}

OuterReduction outer_reduction(const ModelSpec& model) {
    model.validate();
    switch (model.kind) {
        case ModelKind::Schnakenberg:
            return {model.kind, model.schnakenberg().a, model.schnakenberg().b};
        case ModelKind::Brusselator:
            return {model.kind, model.brusselator().a, model.brusselator().f};
        case ModelKind::GM:
            return {model.kind, model.gm().kappa, 0.0};
    }
    throw config_error("bad model kind");
}

double critical_a_closed_form(double b, double Bc) {
    return b / (2.0 * Bc * Bc + 3.0 - 4.0 * std::log(2.0));
}

namespace {
bool within_band(double x, double ref, double band) {
    return std::fabs(x - ref) <= band * std::fabs(ref);
}
} // namespace

Regime classify_regime(const ModelSpec& model, const RegimeThresholds& th) {
    model.validate();
    switch (model.kind) {
        case ModelKind::Schnakenberg: {
            double a = model.schnakenberg().a, b = model.schnakenberg().b;
            double ac = critical_a_closed_form(b, th.Bc_schnakenberg);
            if (within_band(a, b, th.marginal_band) || within_band(a, ac, th.marginal_band))
                return Regime::Marginal;
            if (a > b) return Regime::NoInstability;
            return a < ac ? Regime::Replication : Regime::Nucleation;
        }
        case ModelKind::Brusselator: {
            double f = model.brusselator().f;
            if (within_band(f, 0.5, th.marginal_band) || within_band(f, th.fc_brusselator, th.marginal_band))
                return Regime::Marginal;
            if (f < 0.5) return Regime::NoInstability;
            return f < th.fc_brusselator ? Regime::Nucleation : Regime::Replication;
        }
        case ModelKind::GM: {
            double k = model.gm().kappa;
            if (k > 0 && within_band(k, 1.0, th.marginal_band)) return Regime::Marginal;
            return (k > 0 && k < 1.0) ? Regime::Nucleation : Regime::NoInstability;
        }
    }
    throw config_error("bad model kind");
}

ModelSpec brusselator_from_physical(double E, double B, double D_v, double D_u, double L) {
    if (!(E > 0 && B > 0 && D_v > 0 && D_u > 0 && L > 0))
        throw config_error("brusselator_from_physical needs positive inputs");
    double a = E / std::pow(B + 1.0, 1.5);
    double f = B / (B + 1.0);
    double D = D_u / ((B + 1.0) * L * L);
    double eps2 = D_v / ((B + 1.0) * L * L);
    return ModelSpec::brusselator_spec(a, f, std::sqrt(eps2), D);
}

ModelSpec brusselator_from_tau_form(double eps, double D_u, double tau, double f) {
    if (!(eps > 0 && D_u > 0 && tau > 0))
        throw config_error("brusselator_from_tau_form needs positive inputs");
    double a = std::sqrt(eps / tau);
    double D = D_u / tau;
    return ModelSpec::brusselator_spec(a, f, eps, D);
}

ModelSpec gm_from_physical(double mu_a, double nu_a, double mu_h, double nu_h,
                           double delta_a, double D_a, double D_h) {
    if (!(mu_a > 0 && nu_a > 0 && mu_h > 0 && nu_h > 0 && D_a > 0 && D_h > 0) || delta_a < 0)
        throw config_error("gm_from_physical needs positive rates (delta_a >= 0)");
    double tau = mu_a / mu_h;
    double D = D_h / mu_h;
    double eps2 = D_a / mu_a;
    double kappa = delta_a * nu_h / (mu_h * nu_a);
    return ModelSpec::gm_spec(kappa, std::sqrt(eps2), D, tau);
}

} // namespace spikelab::models
