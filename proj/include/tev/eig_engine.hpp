#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <optional>

#include "tev/assembly.hpp"

namespace tev {

// Sparse Cholesky of an SPD matrix (AMD fill-reducing ordering). A nonpositive
// pivot raises FactorizationError, which upstream signals a regime violation
// rather than a plain numerical failure.
class SpdFactor {
  public:
    explicit SpdFactor(const SparseSym& K);
    explicit SpdFactor(const Eigen::SparseMatrix<double>& full_sym);

    // Relative residual of the returned solution is <= 1e-10 (one step of
    // iterative refinement is applied if the direct solve misses that).
    Eigen::VectorXd solve(const Eigen::VectorXd& b) const;

    int dim() const { return static_cast<int>(matrix_.rows()); }
    long long fill_nnz() const { return fill_nnz_; }

  private:
    Eigen::SparseMatrix<double> matrix_;
    Eigen::SimplicialLLT<Eigen::SparseMatrix<double>> llt_;
    long long fill_nnz_ = 0;
};

struct EigResult {
    double value = 0.0;
    Eigen::VectorXd vector;  // W-normalized: v' W v = 1
    int iterations = 0;
    double residual = 0.0;   // ||Q v - value W v|| / (||Q v|| + |value| ||W v||)
};

using LinOp = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct EigOptions {
    double tol = 1e-8;
    int max_iter = 500;
    int min_iter = 1;  // warm starts that sit exactly on a stale eigenvector
                       // must not be accepted before new directions enter
    int block = 0;     // iterate with max(count, block) vectors; convergence
                       // is gated on the requested count only
    std::optional<Eigen::MatrixXd> initial_guess;  // warm start, n x block
    LinOp preconditioner;                          // approximate inverse of Q's positive part
    Eigen::MatrixXd* final_block = nullptr;        // receives the last iterate block
    std::uint64_t seed = 0x7ef5eedULL;             // deterministic random start
};

// Smallest eigenpair of the symmetric pencil (Q, W) with W SPD, where Q is
// available only through matrix-vector products. LOBPCG-type iteration: the
// Rayleigh quotient decreases monotonically and the iterate block stays
// W-orthonormal. Throws NoConvergence (carrying the best Rayleigh quotient)
// after max_iter.
EigResult smallest_eig(const LinOp& Q, const SparseSym& W, int dim, const EigOptions& opts = {});

// Smallest `count` eigenpairs, ascending.
std::vector<EigResult> smallest_eigs(const LinOp& Q, const SparseSym& W, int dim, int count,
                                     const EigOptions& opts = {});

// Smallest `count` Dirichlet eigenvalues on the FormSet's mesh: the pencil
// (S_II, M_II), or (S_A,II, M_n,II) when weighted (the spectrum of
// -n^{-1} div(A grad)).
std::vector<double> dirichlet_eigs(const FormSet& forms, bool weighted, int count);

}  // namespace tev
