#include "tev/eig_engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "tev/errors.hpp"

namespace tev {

SpdFactor::SpdFactor(const SparseSym& K) : SpdFactor(K.full()) {}

SpdFactor::SpdFactor(const Eigen::SparseMatrix<double>& full_sym) : matrix_(full_sym) {
    matrix_.makeCompressed();
    llt_.compute(matrix_);
    if (llt_.info() != Eigen::Success)
        throw FactorizationError("factor_spd: nonpositive pivot, matrix is not SPD");
    fill_nnz_ = llt_.matrixL().nestedExpression().nonZeros();
}

Eigen::VectorXd SpdFactor::solve(const Eigen::VectorXd& b) const {
    Eigen::VectorXd x = llt_.solve(b);
    const double bn = b.norm();
    if (bn > 0.0) {
        const Eigen::VectorXd r = b - matrix_ * x;
        if (r.norm() > 1e-10 * bn) x += llt_.solve(r);
    }
    return x;
}

namespace {

Eigen::MatrixXd apply_cols(const LinOp& op, const Eigen::MatrixXd& x) {
    Eigen::MatrixXd y(x.rows(), x.cols());
    for (int j = 0; j < x.cols(); ++j) y.col(j) = op(x.col(j));
    return y;
}

// Symmetric W-orthonormalization transform from the Gram matrix G = Z' W Z.
// Directions with Gram eigenvalue below drop_tol * max are removed, so nearly
// dependent search directions cannot poison the Rayleigh-Ritz step.
Eigen::MatrixXd orthonormalizer(const Eigen::MatrixXd& gram, double drop_tol = 1e-12) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
    const Eigen::VectorXd d = es.eigenvalues();
    const double dmax = d.cwiseAbs().maxCoeff();
    int kept = 0;
    for (int i = 0; i < d.size(); ++i)
        if (d[i] > drop_tol * dmax) ++kept;
    Eigen::MatrixXd t(gram.rows(), kept);
    int c = 0;
    for (int i = 0; i < d.size(); ++i)
        if (d[i] > drop_tol * dmax) t.col(c++) = es.eigenvectors().col(i) / std::sqrt(d[i]);
    return t;
}

}  // namespace

std::vector<EigResult> smallest_eigs(const LinOp& Q, const SparseSym& W, int dim, int count,
                                     const EigOptions& opts) {
    if (count < 1 || count > dim) throw RangeError("smallest_eigs: bad count");
    int m = std::max(count, opts.block);
    if (opts.initial_guess && opts.initial_guess->rows() == dim)
        m = std::max<int>(m, static_cast<int>(opts.initial_guess->cols()));
    m = std::min(m, dim);

    Eigen::MatrixXd X(dim, m);
    {
        std::mt19937_64 rng(opts.seed);
        std::normal_distribution<double> gauss;
        int given = 0;
        if (opts.initial_guess && opts.initial_guess->rows() == dim) {
            given = std::min<int>(m, static_cast<int>(opts.initial_guess->cols()));
            X.leftCols(given) = opts.initial_guess->leftCols(given);
        }
        for (int j = given; j < m; ++j)
            for (int i = 0; i < dim; ++i) X(i, j) = gauss(rng);
    }

    auto w_cols = [&W](const Eigen::MatrixXd& x) {
        Eigen::MatrixXd y(x.rows(), x.cols());
        for (int j = 0; j < x.cols(); ++j) y.col(j) = W.apply(x.col(j));
        return y;
    };

    {
        const Eigen::MatrixXd t = orthonormalizer(X.transpose() * w_cols(X));
        X = X * t;
        if (X.cols() < count) throw RangeError("smallest_eigs: initial block is W-degenerate");
    }

    Eigen::MatrixXd QX = apply_cols(Q, X);
    Eigen::MatrixXd P, QP;  // empty on the first sweep
    double best = std::numeric_limits<double>::quiet_NaN();
    // Running lower estimate of ||Q||_2. The residual test must not use
    // ||Q x|| alone: for an eigenvalue near zero the converged x is close to
    // the kernel and ||Q x|| collapses to the residual itself.
    double op_scale = 0.0;
    for (int j = 0; j < X.cols(); ++j) {
        const double xn = X.col(j).norm();
        if (xn > 0.0) op_scale = std::max(op_scale, QX.col(j).norm() / xn);
    }

    for (int iter = 1; iter <= opts.max_iter; ++iter) {
        // Rayleigh-Ritz inside span(X): rotate so X' Q X is diagonal.
        Eigen::VectorXd lambda;
        {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(X.transpose() * QX);
            X = X * es.eigenvectors();
            QX = QX * es.eigenvectors();
            lambda = es.eigenvalues();
        }
        best = lambda[0];

        const Eigen::MatrixXd WX = w_cols(X);
        const Eigen::MatrixXd R = QX - WX * lambda.asDiagonal();
        auto rel_residual = [&](int j) {
            const double denom =
                op_scale * X.col(j).norm() + std::abs(lambda[j]) * WX.col(j).norm();
            return denom > 0.0 ? R.col(j).norm() / denom : 0.0;
        };
        bool done = iter >= opts.min_iter;
        for (int j = 0; done && j < std::min<int>(count, X.cols()); ++j)
            if (rel_residual(j) > opts.tol) done = false;
        if (done) {
            if (opts.final_block) *opts.final_block = X;
            std::vector<EigResult> out(count);
            for (int j = 0; j < count; ++j) {
                out[j].value = lambda[j];
                out[j].vector = X.col(j);
                out[j].iterations = iter;
                out[j].residual = rel_residual(j);
            }
            return out;
        }

        Eigen::MatrixXd H = opts.preconditioner ? apply_cols(opts.preconditioner, R) : R;
        // Column scales must stay comparable to X, or the Gram drop tolerance
        // discards the (small but essential) correction directions near
        // convergence.
        for (int j = 0; j < H.cols(); ++j) {
            const double wn = std::sqrt(std::max(0.0, H.col(j).dot(W.apply(H.col(j)))));
            if (wn > 0.0) H.col(j) /= wn;
        }
        for (int j = 0; j < P.cols(); ++j) {
            const double wn = std::sqrt(std::max(0.0, P.col(j).dot(W.apply(P.col(j)))));
            if (wn > 0.0) {
                P.col(j) /= wn;
                QP.col(j) /= wn;
            }
        }
        const Eigen::MatrixXd QH = apply_cols(Q, H);  // the only fresh operator work per sweep
        for (int j = 0; j < H.cols(); ++j) {
            const double hn = H.col(j).norm();
            if (hn > 0.0) op_scale = std::max(op_scale, QH.col(j).norm() / hn);
        }

        const int zc = static_cast<int>(X.cols() + H.cols() + P.cols());
        Eigen::MatrixXd Z(dim, zc), QZ(dim, zc);
        Z.leftCols(X.cols()) = X;
        QZ.leftCols(X.cols()) = QX;
        Z.middleCols(X.cols(), H.cols()) = H;
        QZ.middleCols(X.cols(), H.cols()) = QH;
        if (P.cols() > 0) {
            Z.rightCols(P.cols()) = P;
            QZ.rightCols(P.cols()) = QP;
        }

        const Eigen::MatrixXd T = orthonormalizer(Z.transpose() * w_cols(Z));
        const Eigen::MatrixXd ZB = Z * T;
        const Eigen::MatrixXd QZB = QZ * T;

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(ZB.transpose() * QZB);
        const int take = std::min<int>(m, ZB.cols());
        const Eigen::MatrixXd Y = es.eigenvectors().leftCols(take);

        // The non-X contribution becomes the next direction block (classical
        // three-term LOBPCG memory).
        const Eigen::MatrixXd TY = T * Y;
        const Eigen::MatrixXd tail = TY.bottomRows(zc - X.cols());
        Eigen::MatrixXd Ztail(dim, zc - X.cols()), QZtail(dim, zc - X.cols());
        Ztail.leftCols(H.cols()) = H;
        QZtail.leftCols(H.cols()) = QH;
        if (P.cols() > 0) {
            Ztail.rightCols(P.cols()) = P;
            QZtail.rightCols(P.cols()) = QP;
        }
        P = Ztail * tail;
        QP = QZtail * tail;
        X = ZB * Y;
        QX = QZB * Y;
    }
    throw NoConvergence("smallest_eigs: no convergence after " + std::to_string(opts.max_iter) +
                            " iterations",
                        best, opts.max_iter);
}

EigResult smallest_eig(const LinOp& Q, const SparseSym& W, int dim, const EigOptions& opts) {
    return smallest_eigs(Q, W, dim, 1, opts).front();
}

std::vector<double> dirichlet_eigs(const FormSet& forms, bool weighted, int count) {
    if (count < 1) throw RangeError("dirichlet_eigs: count must be >= 1");
    const SparseSym K = (weighted ? forms.S_A : forms.S).restricted(forms.interior);
    const SparseSym M = (weighted ? forms.M_n : forms.M).restricted(forms.interior);
    if (count > K.dim()) throw RangeError("dirichlet_eigs: count exceeds interior dimension");
    const SpdFactor kf(K);

    EigOptions opts;
    opts.tol = 1e-10;
    opts.max_iter = 300;
    opts.preconditioner = [&kf](const Eigen::VectorXd& r) { return kf.solve(r); };
    // Guard vectors sharpen the count-th value without gating convergence.
    opts.block = std::min(count + 2, K.dim());

    auto apply = [&K](const Eigen::VectorXd& x) { return K.apply(x); };
    std::vector<EigResult> pairs = smallest_eigs(apply, M, K.dim(), count, opts);

    std::vector<double> values;
    values.reserve(count);
    for (int i = 0; i < count; ++i) values.push_back(pairs[i].value);
    std::sort(values.begin(), values.end());
    return values;
}

}  // namespace tev
