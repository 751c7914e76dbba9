#include "tev/assembly.hpp"

#include <cmath>
#include <ostream>

#include "tev/errors.hpp"

namespace tev {

SparseSym SparseSym::from_triplets(int dim, const std::vector<Eigen::Triplet<double>>& triplets) {
    std::vector<Eigen::Triplet<double>> upper;
    upper.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (t.row() <= t.col())
            upper.emplace_back(t.row(), t.col(), t.value());
        else
            upper.emplace_back(t.col(), t.row(), t.value());
    }
    SparseSym s;
    s.upper_.resize(dim, dim);
    s.upper_.setFromTriplets(upper.begin(), upper.end());
    s.upper_.prune(0.0, 0.0);
    s.upper_.makeCompressed();
    return s;
}

Eigen::SparseMatrix<double> SparseSym::full() const {
    Eigen::SparseMatrix<double> f = upper_.selfadjointView<Eigen::Upper>();
    f.makeCompressed();
    return f;
}

Eigen::VectorXd SparseSym::apply(const Eigen::VectorXd& x) const {
    return upper_.selfadjointView<Eigen::Upper>() * x;
}

SparseSym SparseSym::restricted(const std::vector<int>& keep) const {
    std::vector<int> where(dim(), -1);
    for (std::size_t i = 0; i < keep.size(); ++i) where[keep[i]] = static_cast<int>(i);
    std::vector<Eigen::Triplet<double>> ts;
    for (int col = 0; col < upper_.outerSize(); ++col) {
        for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, col); it; ++it) {
            const int i = where[it.row()], j = where[it.col()];
            if (i >= 0 && j >= 0) ts.emplace_back(i, j, it.value());
        }
    }
    return from_triplets(static_cast<int>(keep.size()), ts);
}

SparseSym SparseSym::scaled(double alpha) const {
    SparseSym s;
    s.upper_ = alpha * upper_;
    return s;
}

SparseSym SparseSym::plus(const SparseSym& other, double alpha) const {
    SparseSym s;
    s.upper_ = upper_ + alpha * other.upper_;
    s.upper_.prune(0.0, 0.0);
    s.upper_.makeCompressed();
    return s;
}

void SparseSym::dump(std::ostream& os) const {
    os << "%%sym " << dim() << ' ' << nnz() << '\n';
    os.precision(17);
    for (int col = 0; col < upper_.outerSize(); ++col)
        for (Eigen::SparseMatrix<double>::InnerIterator it(upper_, col); it; ++it)
            os << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
}

Eigen::VectorXd FormSet::extend(const Eigen::VectorXd& u_interior) const {
    Eigen::VectorXd full = Eigen::VectorXd::Zero(n_full);
    for (int i = 0; i < n_interior(); ++i) full[interior[i]] = u_interior[i];
    return full;
}

Eigen::VectorXd FormSet::restrict_to_interior(const Eigen::VectorXd& full) const {
    Eigen::VectorXd u(n_interior());
    for (int i = 0; i < n_interior(); ++i) u[i] = full[interior[i]];
    return u;
}

FormSet assemble(const Mesh& mesh, const MaterialParams& params,
                 std::optional<Regime> regime_override) {
    params.validate();
    const int nv = mesh.num_vertices();
    std::vector<Eigen::Triplet<double>> ts, tsa, tm;
    ts.reserve(9 * mesh.num_triangles());
    tsa.reserve(9 * mesh.num_triangles());
    tm.reserve(9 * mesh.num_triangles());

    const Eigen::Matrix2d A = params.a_matrix;
    for (const auto& t : mesh.triangles) {
        const Eigen::Vector2d& p0 = mesh.vertices[t[0]];
        const Eigen::Vector2d& p1 = mesh.vertices[t[1]];
        const Eigen::Vector2d& p2 = mesh.vertices[t[2]];
        Eigen::Matrix2d B;
        B.col(0) = p1 - p0;
        B.col(1) = p2 - p0;
        const double detB = B.determinant();
        const double area = 0.5 * std::abs(detB);
        // P1 gradients are constant: rows of [-1 -1; 1 0; 0 1] * B^{-1}
        Eigen::Matrix<double, 3, 2> ref;
        ref << -1, -1, 1, 0, 0, 1;
        const Eigen::Matrix<double, 3, 2> grads = ref * B.inverse();
        const Eigen::Matrix3d Ke = area * grads * grads.transpose();
        const Eigen::Matrix3d KeA = area * grads * A * grads.transpose();
        // exact P1 mass: area/12 * (2 on the diagonal, 1 off)
        Eigen::Matrix3d Me = Eigen::Matrix3d::Constant(area / 12.0);
        Me.diagonal().array() *= 2.0;
        // each symmetric entry goes in exactly once (folded to the upper triangle)
        for (int i = 0; i < 3; ++i) {
            for (int j = i; j < 3; ++j) {
                ts.emplace_back(t[i], t[j], Ke(i, j));
                tsa.emplace_back(t[i], t[j], KeA(i, j));
                tm.emplace_back(t[i], t[j], Me(i, j));
            }
        }
    }

    std::vector<Eigen::Triplet<double>> tb;
    tb.reserve(4 * mesh.boundary_edges.size());
    for (const auto& e : mesh.boundary_edges) {
        const double len = (mesh.vertices[e[0]] - mesh.vertices[e[1]]).norm();
        // exact P1 edge mass: len/6 * [2 1; 1 2], scaled by the constant eta
        const double w = params.eta * len / 6.0;
        tb.emplace_back(e[0], e[0], 2.0 * w);
        tb.emplace_back(e[1], e[1], 2.0 * w);
        tb.emplace_back(e[0], e[1], w);
    }

    FormSet f;
    f.S = SparseSym::from_triplets(nv, ts);
    f.S_A = SparseSym::from_triplets(nv, tsa);
    f.M = SparseSym::from_triplets(nv, tm);
    f.M_n = f.M.scaled(params.n);
    f.B_eta = SparseSym::from_triplets(nv, tb);
    f.interior = mesh.interior_nodes;
    f.n_full = nv;
    f.params = params;
    f.regime = regime_override ? *regime_override : classify(params);
    return f;
}

SparseSym aux_matrix(const FormSet& forms, double k) {
    if (forms.regime == Regime::Neither)
        throw RegimeError("assembly: auxiliary form is only definite in CaseI/CaseII");
    const double k2 = k * k;
    return forms.S.plus(forms.S_A, -1.0).plus(forms.M_n, k2).plus(forms.M, -k2).plus(forms.B_eta);
}

Eigen::SparseMatrix<double> rhs_matrix(const FormSet& forms, double k) {
    const Eigen::SparseMatrix<double> R =
        forms.S_A.full() - (k * k) * forms.M_n.full();
    // column restriction to interior nodes (zero-extension composed on the right)
    Eigen::SparseMatrix<double> C(forms.n_full, forms.n_interior());
    std::vector<Eigen::Triplet<double>> ts;
    ts.reserve(R.nonZeros() / 2);
    std::vector<int> where(forms.n_full, -1);
    for (int i = 0; i < forms.n_interior(); ++i) where[forms.interior[i]] = i;
    for (int col = 0; col < R.outerSize(); ++col) {
        const int j = where[col];
        if (j < 0) continue;
        for (Eigen::SparseMatrix<double>::InnerIterator it(R, col); it; ++it)
            ts.emplace_back(static_cast<int>(it.row()), j, it.value());
    }
    C.setFromTriplets(ts.begin(), ts.end());
    C.makeCompressed();
    return C;
}

}  // namespace tev
