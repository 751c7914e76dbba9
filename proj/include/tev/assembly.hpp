#pragma once

#include <Eigen/Sparse>
#include <iosfwd>
#include <optional>
#include <vector>

#include "tev/mesh.hpp"
#include "tev/params.hpp"

namespace tev {

// Symmetric sparse matrix storing only the upper triangle (row <= col),
// consolidated with no explicit zeros.
class SparseSym {
  public:
    SparseSym() = default;
    // Each symmetric entry must appear once; (j, i) entries fold onto (i, j).
    static SparseSym from_triplets(int dim, const std::vector<Eigen::Triplet<double>>& triplets);

    int dim() const { return static_cast<int>(upper_.rows()); }
    int nnz() const { return static_cast<int>(upper_.nonZeros()); }
    const Eigen::SparseMatrix<double>& upper() const { return upper_; }

    // Full symmetric expansion (both triangles), e.g. for factorization.
    Eigen::SparseMatrix<double> full() const;
    Eigen::VectorXd apply(const Eigen::VectorXd& x) const;

    // Principal submatrix on the given (ascending) index set.
    SparseSym restricted(const std::vector<int>& keep) const;

    SparseSym scaled(double alpha) const;
    SparseSym plus(const SparseSym& other, double alpha = 1.0) const;  // this + alpha*other

    // Coordinate text dump: "%%sym dim nnz" header then "i j value" lines.
    void dump(std::ostream& os) const;

  private:
    Eigen::SparseMatrix<double> upper_;
};

// The assembled P1 forms on one mesh:
//   S     stiffness  (grad phi_i, grad phi_j)
//   S_A   anisotropic stiffness (grad phi_i, A grad phi_j)
//   M     mass, M_n weighted mass (n phi_i, phi_j)
//   B_eta boundary mass over the boundary edges, weight eta
// plus the interior-node index set realizing the H^1_0 test space.
struct FormSet {
    SparseSym S, S_A, M, M_n, B_eta;
    std::vector<int> interior;
    int n_full = 0;
    MaterialParams params;
    Regime regime = Regime::Neither;
    int refinement = 0;  // metadata carried into results

    int n_interior() const { return static_cast<int>(interior.size()); }

    // Zero-extension of an interior coefficient vector to all nodes, and its
    // transpose (restriction).
    Eigen::VectorXd extend(const Eigen::VectorXd& u_interior) const;
    Eigen::VectorXd restrict_to_interior(const Eigen::VectorXd& full) const;
};

// Exact P1 element integration (constant coefficients need no quadrature).
// The regime stored in the FormSet defaults to classify(params); limit
// studies at eta = 0 pass the override explicitly.
FormSet assemble(const Mesh& mesh, const MaterialParams& params,
                 std::optional<Regime> regime_override = {});

// Left-hand side of the auxiliary problem:
//   G_k = (S - S_A) + k^2 (M_n - M) + B_eta.
// Positive definite in CaseII, negative definite in CaseI; RegimeError when
// the FormSet regime is Neither.
SparseSym aux_matrix(const FormSet& forms, double k);

// Right-hand side map C_k = (S_A - k^2 M_n) E from interior coefficient
// vectors to full-node load vectors.
Eigen::SparseMatrix<double> rhs_matrix(const FormSet& forms, double k);

}  // namespace tev
