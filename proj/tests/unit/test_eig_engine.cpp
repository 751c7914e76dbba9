#include <doctest.h>

#include <cmath>
#include <random>

#include "tev/eig_engine.hpp"

using namespace tev;

namespace {

Mesh make(DomainSpec::Kind kind, int r) {
    DomainSpec d;
    d.kind = kind;
    d.refinement = r;
    return generate(d);
}

}  // namespace

TEST_CASE("factor of the identity solves trivially") {
    std::vector<Eigen::Triplet<double>> ts;
    for (int i = 0; i < 5; ++i) ts.emplace_back(i, i, 1.0);
    const SpdFactor f(SparseSym::from_triplets(5, ts));
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(5, 1.0, 5.0);
    CHECK((f.solve(b) - b).norm() == 0.0);
}

TEST_CASE("indefinite matrices are rejected with FactorizationError") {
    std::vector<Eigen::Triplet<double>> ts = {{0, 0, 1.0}, {1, 1, -1.0}};
    CHECK_THROWS_AS(SpdFactor(SparseSym::from_triplets(2, ts)), FactorizationError);
}

TEST_CASE("interior stiffness solve meets the residual contract") {
    const Mesh mesh = make(DomainSpec::Kind::UnitSquare, 2);
    const FormSet f = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.0));
    const SparseSym s_ii = f.S.restricted(f.interior);
    const SpdFactor factor(s_ii);
    std::mt19937_64 rng(3);
    std::normal_distribution<double> gauss;
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::VectorXd b(s_ii.dim());
        for (int i = 0; i < b.size(); ++i) b[i] = gauss(rng);
        const Eigen::VectorXd x = factor.solve(b);
        CHECK((s_ii.apply(x) - b).norm() <= 1e-10 * b.norm());
    }
    CHECK(factor.fill_nnz() >= s_ii.nnz());
}

TEST_CASE("pencil (W, W) has smallest eigenvalue one") {
    const Mesh mesh = make(DomainSpec::Kind::UnitDisk, 1);
    const FormSet f = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.0));
    const SparseSym m_ii = f.M.restricted(f.interior);
    auto apply = [&m_ii](const Eigen::VectorXd& x) { return m_ii.apply(x); };
    const EigResult r = smallest_eig(apply, m_ii, m_ii.dim());
    CHECK(r.value == doctest::Approx(1.0).epsilon(1e-8));
    CHECK(r.vector.dot(m_ii.apply(r.vector)) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("square Dirichlet eigenvalue converges to 2 pi^2 from above") {
    double prev = std::numeric_limits<double>::infinity();
    const double exact = 2.0 * M_PI * M_PI;
    for (int r : {1, 2, 3}) {
        const Mesh mesh = make(DomainSpec::Kind::UnitSquare, r);
        const FormSet f = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.0));
        const double lam = dirichlet_eigs(f, false, 1).front();
        CHECK(lam > exact);
        CHECK(lam < prev);
        prev = lam;
    }
    CHECK(prev == doctest::Approx(exact).epsilon(1e-2));
}

TEST_CASE("disk Dirichlet eigenvalue matches the first Bessel zero") {
    const Mesh mesh = make(DomainSpec::Kind::UnitDisk, 4);
    const FormSet f = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.0));
    const double lam = dirichlet_eigs(f, false, 1).front();
    CHECK(std::sqrt(lam) == doctest::Approx(2.4048).epsilon(5e-3));
}

TEST_CASE("weighted spectrum is the (a/n)-scaled Laplace spectrum") {
    const Mesh mesh = make(DomainSpec::Kind::LShape, 2);
    const MaterialParams p = MaterialParams::isotropic(0.4, 3.0, 2.0);
    const FormSet f = assemble(mesh, p);
    const auto unweighted = dirichlet_eigs(f, false, 3);
    const auto weighted = dirichlet_eigs(f, true, 3);
    for (int j = 0; j < 3; ++j) {
        const double expected = unweighted[j] * p.scalar_a() / p.n;
        CHECK(std::abs(weighted[j] - expected) <= 1e-10 * expected);
    }
}

TEST_CASE("eigensolver honors warm starts and the iteration cap") {
    const Mesh mesh = make(DomainSpec::Kind::UnitSquare, 2);
    const FormSet f = assemble(mesh, MaterialParams::isotropic(1.0, 1.0, 0.0));
    const SparseSym s_ii = f.S.restricted(f.interior);
    const SparseSym m_ii = f.M.restricted(f.interior);
    auto apply = [&s_ii](const Eigen::VectorXd& x) { return s_ii.apply(x); };

    EigOptions strangled;
    strangled.max_iter = 1;
    strangled.tol = 1e-12;
    bool threw = false;
    try {
        smallest_eig(apply, m_ii, s_ii.dim(), strangled);
    } catch (const NoConvergence& e) {
        threw = true;
        CHECK(std::isfinite(e.best_value));
        CHECK(e.iterations == 1);
    }
    CHECK(threw);

    // a converged eigenvector as warm start finishes immediately
    const SpdFactor sf(s_ii);
    EigOptions good;
    good.preconditioner = [&sf](const Eigen::VectorXd& r) { return sf.solve(r); };
    const EigResult first = smallest_eig(apply, m_ii, s_ii.dim(), good);
    EigOptions warm = good;
    warm.initial_guess = first.vector;
    const EigResult again = smallest_eig(apply, m_ii, s_ii.dim(), warm);
    CHECK(again.iterations <= 3);
    CHECK(again.value == doctest::Approx(first.value).epsilon(1e-9));
}
