#pragma once

#include <iosfwd>
#include <limits>
#include <memory>
#include <utility>
#include <vector>

#include "tev/assembly.hpp"
#include "tev/eig_engine.hpp"
#include "tev/result.hpp"

namespace tev {

// The per-k discrete operator behind the quadratic form (L_k u, u):
//   Q_k u = K_u u + C' G_k^{-1} C u,  K_u = E'(S_A - k^2 M_n)E,  C = (S_A - k^2 M_n)E.
// The factorized matrix is sigma * G_k (always SPD in regime), so the
// operator exposed to the eigensolver is sigma * Q_k: positive definite below
// the Faber-Krahn floor in both regimes.
class LkOperator {
  public:
    LkOperator(const FormSet& forms, double k);

    // (sigma Q_k) u for an interior coefficient vector u.
    Eigen::VectorXd apply(const Eigen::VectorXd& u) const;

    // Solution v_u of the auxiliary problem G_k v = C_k u, on all nodes.
    Eigen::VectorXd solve_aux(const Eigen::VectorXd& u) const;

    double k() const { return k_; }
    int sigma() const { return sigma_; }
    int dim() const { return static_cast<int>(c_.cols()); }

  private:
    double k_;
    int sigma_;
    SparseSym k_u_;
    Eigen::SparseMatrix<double> c_;
    SpdFactor g_;  // factor of sigma * G_k
};

// Which SPD weight defines the eigenvalue pencil. Only the sign and the roots
// of f matter for eigenvalue location, and those are weight-invariant; the
// mass matrix is the cheapest choice, (S+M) realizes the discrete H^1 inner
// product.
enum class PencilWeight { Mass, H1 };

struct FemOptions {
    double scan_step = 0.05;
    double bisect_tol = 1e-4;
    double eig_tol = 1e-8;       // eigensolve tolerance during bisection
    double scan_eig_tol = 1e-6;  // looser tolerance while only signs are needed
    int eig_max_iter = 900;
    PencilWeight weight = PencilWeight::Mass;
    // Sign-change pairs whose dip stays below this fraction of the local f
    // scale are grazing (near-double) contacts, reported but not returned as
    // roots; dips that do not cross zero are flagged the same way.
    double grazing_rel_tol = 0.02;
    double near_tol_rel = 0.02;
    int grazing_window = 25;  // grid steps examined around a crossing
    int threads = 1;          // parallel f evaluations across the scan grid
};

// The sampled sign curve of one scan.
struct SignScan {
    std::vector<double> k_grid;
    std::vector<double> f_values;
    std::vector<std::pair<double, double>> sign_changes;  // bracket cells
};

// Two-column CSV (k, f).
void write_csv(const SignScan& scan, std::ostream& os);

struct FemScanOutcome {
    std::vector<TevResult> roots;       // clear sign-change roots, ascending
    std::vector<TevResult> near_roots;  // grazing pairs / zero-touching dips
    SignScan scan;
};

// Shared state for repeated f evaluations on one FormSet: the k-independent
// preconditioner, the cached first Dirichlet eigenvalue, and the warm-start
// vector carried from the previous k.
class FemTevSolver {
  public:
    explicit FemTevSolver(FormSet forms, FemOptions opts = {});

    // f(k) = smallest eigenvalue of the pencil (sigma Q_k, W).
    double f(double k);
    double f(double k, double eig_tol);

    // First Dirichlet eigenvalue of -Laplace on this mesh (cached).
    double lambda1();

    // 0.9 x Faber-Krahn floor, the default scan start.
    double default_k_lo();

    // Scans [k_lo, k_hi] (k_lo = NaN selects the default floor), takes the
    // first clear +to- sign change and bisects it. NoRootInRange when no
    // clear crossing exists; FactorizationError reports the offending k.
    TevResult find_first_tev(std::pair<double, double> k_bracket);

    // All clear roots in the bracket, ascending, up to max_count, plus
    // flagged near-roots.
    FemScanOutcome find_tevs_in_range(std::pair<double, double> k_bracket, int max_count);

    const FormSet& forms() const { return forms_; }
    const FemOptions& options() const { return opts_; }

  private:
    double f_impl(double k, double eig_tol, bool allow_warm);
    FemScanOutcome scan_range(double k_lo, double k_hi, int max_count, bool stop_at_first);
    double bisect(double lo, double hi, double flo);

    FormSet forms_;
    FemOptions opts_;
    SparseSym weight_;
    std::unique_ptr<SpdFactor> precond_;
    Eigen::MatrixXd warm_;
    double lambda1_ = std::numeric_limits<double>::quiet_NaN();
};

// One-shot f(k) evaluation (fresh solver; tests and diagnostics).
double f_of_k(const FormSet& forms, double k, double eig_tol = 1e-8,
              PencilWeight weight = PencilWeight::Mass);

// Convenience wrappers over FemTevSolver.
TevResult find_first_tev(const FormSet& forms, std::pair<double, double> k_bracket,
                         const FemOptions& opts = {});
FemScanOutcome find_tevs_in_range(const FormSet& forms, std::pair<double, double> k_bracket,
                                  const FemOptions& opts = {}, int max_count = 8);

}  // namespace tev
