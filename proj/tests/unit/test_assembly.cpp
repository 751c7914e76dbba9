#include <doctest.h>

#include <cmath>
#include <sstream>

#include "tev/assembly.hpp"
#include "tev/eig_engine.hpp"

using namespace tev;

namespace {

Mesh make(DomainSpec::Kind kind, int r) {
    DomainSpec d;
    d.kind = kind;
    d.refinement = r;
    return generate(d);
}

double quad_form_ones(const SparseSym& s) {
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.dim());
    return ones.dot(s.apply(ones));
}

}  // namespace

TEST_CASE("form invariants: stiffness kernel, area, and perimeter sums") {
    const MaterialParams p = MaterialParams::isotropic(0.4, 3.0, 2.0);
    for (auto kind : {DomainSpec::Kind::UnitSquare, DomainSpec::Kind::LShape,
                      DomainSpec::Kind::UnitDisk}) {
        for (int r : {0, 1, 2}) {
            const Mesh mesh = make(kind, r);
            const FormSet f = assemble(mesh, p);
            const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f.n_full);
            CHECK(f.S.apply(ones).lpNorm<Eigen::Infinity>() < 1e-12);
            CHECK(f.S_A.apply(ones).lpNorm<Eigen::Infinity>() < 1e-12);
            CHECK(quad_form_ones(f.M) == doctest::Approx(mesh.total_area()).epsilon(1e-10));
            CHECK(quad_form_ones(f.M_n) ==
                  doctest::Approx(p.n * mesh.total_area()).epsilon(1e-10));
            CHECK(quad_form_ones(f.B_eta) ==
                  doctest::Approx(p.eta * mesh.boundary_length()).epsilon(1e-10));
        }
    }
}

TEST_CASE("unit square boundary mass with eta = 2 sums to 8") {
    const FormSet f =
        assemble(make(DomainSpec::Kind::UnitSquare, 0), MaterialParams::isotropic(0.4, 3.0, 2.0));
    CHECK(quad_form_ones(f.B_eta) == doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("identity coefficients collapse the weighted forms") {
    const Mesh mesh = make(DomainSpec::Kind::LShape, 1);
    const FormSet f = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.5));
    CHECK(Eigen::MatrixXd(f.S_A.full() - f.S.full()).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(Eigen::MatrixXd(f.M_n.full() - f.M.full()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("assembled matrices are exactly symmetric by construction") {
    const Mesh mesh = make(DomainSpec::Kind::UnitSquare, 0);
    const FormSet f = assemble(mesh, MaterialParams::isotropic(2.0, 0.5, -1.0));
    for (const SparseSym* s : {&f.S, &f.S_A, &f.M, &f.M_n, &f.B_eta}) {
        const Eigen::MatrixXd d = Eigen::MatrixXd(s->full());
        CHECK((d - d.transpose()).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("mass matrices are positive definite, boundary mass carries eta's sign") {
    const Mesh mesh = make(DomainSpec::Kind::UnitDisk, 1);
    const MaterialParams p = MaterialParams::isotropic(0.4, 3.0, -2.0);
    const FormSet f = assemble(mesh, p);
    CHECK_NOTHROW(SpdFactor(f.M));
    CHECK_NOTHROW(SpdFactor(f.M_n));
    // restrict -B_eta to boundary nodes: SPD there for eta < 0
    std::vector<int> bnodes;
    for (int i = 0; i < f.n_full; ++i)
        if (std::find(f.interior.begin(), f.interior.end(), i) == f.interior.end())
            bnodes.push_back(i);
    CHECK_NOTHROW(SpdFactor(f.B_eta.scaled(-1.0).restricted(bnodes)));
    CHECK_THROWS_AS(SpdFactor(f.B_eta.restricted(bnodes)), FactorizationError);
}

TEST_CASE("auxiliary matrix definiteness follows the regime sign") {
    const Mesh mesh = make(DomainSpec::Kind::UnitSquare, 1);
    const FormSet case2 = assemble(mesh, MaterialParams::isotropic(0.4, 3.0, 2.0));
    for (double k : {0.0, 1.0, 4.0}) CHECK_NOTHROW(SpdFactor(aux_matrix(case2, k)));

    const FormSet case1 = assemble(mesh, MaterialParams::isotropic(3.0, 0.7, -2.0));
    for (double k : {0.0, 1.0, 4.0}) {
        CHECK_THROWS_AS(SpdFactor(aux_matrix(case1, k)), FactorizationError);
        CHECK_NOTHROW(SpdFactor(aux_matrix(case1, k).scaled(-1.0)));
    }

    const FormSet neither = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.0));
    CHECK_THROWS_AS(aux_matrix(neither, 1.0), RegimeError);
}

TEST_CASE("rhs map: kernel identities and the k = 0 collapse") {
    const Mesh mesh = make(DomainSpec::Kind::UnitSquare, 1);
    const MaterialParams p = MaterialParams::isotropic(0.4, 3.0, 2.0);
    const FormSet f = assemble(mesh, p);
    const int ni = f.n_interior();

    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(ni);
    CHECK((rhs_matrix(f, 1.3) * zero).norm() == 0.0);

    // k = 0 leaves the anisotropic stiffness columns
    const Eigen::SparseMatrix<double> c0 = rhs_matrix(f, 0.0);
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(ni, -1.0, 2.0);
    CHECK((c0 * u - f.S_A.apply(f.extend(u))).lpNorm<Eigen::Infinity>() < 1e-12);

    // stiffness rows sum to zero, so 1' C_k u = -k^2 * (n u, 1)_{L2}
    const double k = 1.7;
    const Eigen::SparseMatrix<double> ck = rhs_matrix(f, k);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(f.n_full);
    const double lhs = ones.dot(ck * u);
    const double rhs = -k * k * ones.dot(f.M_n.apply(f.extend(u)));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
}

TEST_CASE("sparse symmetric storage: restriction and dump format") {
    std::vector<Eigen::Triplet<double>> ts = {{0, 0, 2.0}, {1, 0, -1.0}, {1, 1, 2.0},
                                              {2, 2, 1.0}, {0, 2, 0.5}};
    const SparseSym s = SparseSym::from_triplets(3, ts);
    const Eigen::MatrixXd d = Eigen::MatrixXd(s.full());
    CHECK(d(0, 1) == -1.0);
    CHECK(d(1, 0) == -1.0);
    CHECK(d(2, 0) == 0.5);

    const SparseSym r = s.restricted({0, 2});
    const Eigen::MatrixXd rd = Eigen::MatrixXd(r.full());
    CHECK(rd.rows() == 2);
    CHECK(rd(0, 1) == 0.5);
    CHECK(rd(1, 1) == 1.0);

    std::ostringstream os;
    s.dump(os);
    CHECK(os.str().rfind("%%sym 3 ", 0) == 0);
}
