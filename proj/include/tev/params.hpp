#pragma once

#include <Eigen/Dense>
#include <string>

#include "tev/errors.hpp"

namespace tev {

// Constant material coefficients (A, n, eta) of the interior problem.
// A is a symmetric positive definite 2x2 matrix, n > 0 a refractive index,
// eta a real boundary conductivity (any sign, zero allowed for limit studies).
struct MaterialParams {
    Eigen::Matrix2d a_matrix = Eigen::Matrix2d::Identity();
    double n = 1.0;
    double eta = 0.0;

    static MaterialParams isotropic(double a, double n, double eta);
    static MaterialParams anisotropic(const Eigen::Matrix2d& a, double n, double eta);

    // Extreme eigenvalues of a_matrix; for constant coefficients these are the
    // A_min/A_max bounds of the theory (and n_min = n_max = n, same for eta).
    double a_min() const;
    double a_max() const;

    // True when a_matrix is a scalar multiple of the identity.
    bool is_isotropic(double rel_tol = 1e-14) const;
    // The scalar a with A = aI; ShapeError when the matrix is not isotropic.
    double scalar_a() const;

    // Enforces the type invariants. ValidationError on violation.
    void validate() const;
};

// Coefficient sign patterns under which the theory provides existence,
// the Faber-Krahn floor, and definiteness of the auxiliary form:
//   CaseI : A_min - 1 > 0, n - 1 < 0, eta < 0
//   CaseII: A_max - 1 < 0, n - 1 > 0, eta > 0
// Anything else (including eta = 0) classifies as Neither.
enum class Regime { CaseI, CaseII, Neither };

const char* to_string(Regime r);

// Strict classification; total on valid params.
Regime classify(const MaterialParams& params);

// Same as classify() except that eta == 0 is resolved from the (A, n) pattern
// alone. Only limit studies (eta -> 0 reference solves) should use this.
Regime classify_with_eta_zero_override(const MaterialParams& params);

// +1 for CaseII, -1 for CaseI; RegimeError for Neither. This is the sign that
// makes the factorized auxiliary matrix positive definite.
int regime_sign(Regime regime);

// Lower bound below which no real transmission eigenvalue can exist:
//   CaseI : sqrt(lambda1)
//   CaseII: sqrt(A_min * lambda1 / n_max)
// lambda1 is the first Dirichlet eigenvalue of -Laplace on the domain.
// RegimeError when the regime is Neither.
double faber_krahn_lower_bound(Regime regime, const MaterialParams& params, double lambda1);
double faber_krahn_lower_bound(const MaterialParams& params, double lambda1);

// Catalog of computational domains. UnitSquare is (-1/2,1/2)^2 and LShape is
// (-1/2,1/2)^2 minus the closed quadrant [0,1/2]^2.
struct DomainSpec {
    enum class Kind { UnitDisk, UnitSquare, LShape, ExternalMesh };
    Kind kind = Kind::UnitSquare;
    int refinement = 0;
    std::string path;  // only for ExternalMesh

    static DomainSpec parse(const std::string& name, int refinement);
    std::string name() const;
};

}  // namespace tev
