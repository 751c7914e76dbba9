#include "tev/params.hpp"

#include <cmath>

namespace tev {

MaterialParams MaterialParams::isotropic(double a, double n, double eta) {
    MaterialParams p;
    p.a_matrix = a * Eigen::Matrix2d::Identity();
    p.n = n;
    p.eta = eta;
    p.validate();
    return p;
}

MaterialParams MaterialParams::anisotropic(const Eigen::Matrix2d& a, double n, double eta) {
    MaterialParams p;
    p.a_matrix = a;
    p.n = n;
    p.eta = eta;
    p.validate();
    return p;
}

double MaterialParams::a_min() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a_matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

double MaterialParams::a_max() const {
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(a_matrix, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(1);
}

bool MaterialParams::is_isotropic(double rel_tol) const {
    const double scale = a_matrix.cwiseAbs().maxCoeff();
    return std::abs(a_matrix(0, 1)) <= rel_tol * scale &&
           std::abs(a_matrix(1, 0)) <= rel_tol * scale &&
           std::abs(a_matrix(0, 0) - a_matrix(1, 1)) <= rel_tol * scale;
}

double MaterialParams::scalar_a() const {
    if (!is_isotropic())
        throw ShapeError("params: A is not a scalar multiple of the identity");
    return 0.5 * (a_matrix(0, 0) + a_matrix(1, 1));
}

void MaterialParams::validate() const {
    if (!a_matrix.allFinite() || !std::isfinite(n) || !std::isfinite(eta))
        throw ValidationError("params: non-finite coefficient");
    if (std::abs(a_matrix(0, 1) - a_matrix(1, 0)) >
        1e-12 * std::max(1.0, a_matrix.cwiseAbs().maxCoeff()))
        throw ValidationError("params: A must be symmetric");
    if (a_min() <= 0.0)
        throw ValidationError("params: A must be positive definite");
    if (n <= 0.0)
        throw ValidationError("params: n must be positive");
}

const char* to_string(Regime r) {
    switch (r) {
        case Regime::CaseI: return "CaseI";
        case Regime::CaseII: return "CaseII";
        default: return "Neither";
    }
}

namespace {

// Classification from the (A, n) pattern only; used when eta's sign is moot.
Regime classify_an(const MaterialParams& p) {
    if (p.a_min() - 1.0 > 0.0 && p.n - 1.0 < 0.0) return Regime::CaseI;
    if (p.a_max() - 1.0 < 0.0 && p.n - 1.0 > 0.0) return Regime::CaseII;
    return Regime::Neither;
}

}  // namespace

Regime classify(const MaterialParams& p) {
    const Regime an = classify_an(p);
    if (an == Regime::CaseI && p.eta < 0.0) return Regime::CaseI;
    if (an == Regime::CaseII && p.eta > 0.0) return Regime::CaseII;
    return Regime::Neither;
}

Regime classify_with_eta_zero_override(const MaterialParams& p) {
    if (p.eta == 0.0) return classify_an(p);
    return classify(p);
}

int regime_sign(Regime regime) {
    switch (regime) {
        case Regime::CaseI: return -1;
        case Regime::CaseII: return +1;
        default:
            throw RegimeError("regime: coefficients fall into neither coercivity case");
    }
}

double faber_krahn_lower_bound(Regime regime, const MaterialParams& params, double lambda1) {
    switch (regime) {
        case Regime::CaseI:
            return std::sqrt(lambda1);
        case Regime::CaseII:
            return std::sqrt(params.a_min() * lambda1 / params.n);
        default:
            throw RegimeError("faber_krahn: no lower bound outside CaseI/CaseII");
    }
}

double faber_krahn_lower_bound(const MaterialParams& params, double lambda1) {
    return faber_krahn_lower_bound(classify(params), params, lambda1);
}

DomainSpec DomainSpec::parse(const std::string& name, int refinement) {
    DomainSpec d;
    d.refinement = refinement;
    if (name == "disk") {
        d.kind = Kind::UnitDisk;
    } else if (name == "square") {
        d.kind = Kind::UnitSquare;
    } else if (name == "lshape") {
        d.kind = Kind::LShape;
    } else if (name.rfind("mesh:", 0) == 0) {
        d.kind = Kind::ExternalMesh;
        d.path = name.substr(5);
    } else {
        throw ConfigError("domain: unknown kind '" + name + "'");
    }
    return d;
}

std::string DomainSpec::name() const {
    switch (kind) {
        case Kind::UnitDisk: return "disk";
        case Kind::UnitSquare: return "square";
        case Kind::LShape: return "lshape";
        default: return "mesh:" + path;
    }
}

}  // namespace tev
