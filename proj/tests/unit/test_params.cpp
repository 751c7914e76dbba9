#include <doctest.h>

#include <cmath>

#include "tev/params.hpp"

using tev::classify;
using tev::classify_with_eta_zero_override;
using tev::faber_krahn_lower_bound;
using tev::MaterialParams;
using tev::Regime;

TEST_CASE("classification follows the strict sign patterns") {
    CHECK(classify(MaterialParams::isotropic(3.0, 0.7, -2.0)) == Regime::CaseI);
    CHECK(classify(MaterialParams::isotropic(0.4, 3.0, 2.0)) == Regime::CaseII);
    CHECK(classify(MaterialParams::isotropic(1.0, 1.0, 0.0)) == Regime::Neither);
    // boundary values are excluded by the strict inequalities
    CHECK(classify(MaterialParams::isotropic(1.0, 0.7, -2.0)) == Regime::Neither);
    CHECK(classify(MaterialParams::isotropic(3.0, 1.0, -2.0)) == Regime::Neither);
    CHECK(classify(MaterialParams::isotropic(3.0, 0.7, 0.0)) == Regime::Neither);
    CHECK(classify(MaterialParams::isotropic(0.4, 3.0, -1.0)) == Regime::Neither);
}

TEST_CASE("eta = 0 override resolves the regime from A and n alone") {
    CHECK(classify_with_eta_zero_override(MaterialParams::isotropic(0.4, 3.0, 0.0)) ==
          Regime::CaseII);
    CHECK(classify_with_eta_zero_override(MaterialParams::isotropic(3.0, 0.7, 0.0)) ==
          Regime::CaseI);
    CHECK(classify_with_eta_zero_override(MaterialParams::isotropic(1.0, 1.0, 0.0)) ==
          Regime::Neither);
    // nonzero eta goes through the strict classification unchanged
    CHECK(classify_with_eta_zero_override(MaterialParams::isotropic(0.4, 3.0, -1.0)) ==
          Regime::Neither);
}

TEST_CASE("classification sees only the eigenvalue range of A") {
    // rotate diag(2, 4) by 30 degrees: same eigenvalues, full matrix
    Eigen::Matrix2d r;
    const double c = std::cos(M_PI / 6), s = std::sin(M_PI / 6);
    r << c, -s, s, c;
    Eigen::Matrix2d a = r * Eigen::Vector2d(2.0, 4.0).asDiagonal() * r.transpose();
    const MaterialParams full = MaterialParams::anisotropic(a, 0.7, -1.0);
    CHECK(full.a_min() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(full.a_max() == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(classify(full) == classify(MaterialParams::isotropic(2.0, 0.7, -1.0)));
    CHECK_FALSE(full.is_isotropic());
    CHECK_THROWS_AS(full.scalar_a(), tev::ShapeError);
}

TEST_CASE("faber-krahn lower bound per regime") {
    const double lam1 = 2.404825557695773 * 2.404825557695773;
    const MaterialParams case2 = MaterialParams::isotropic(0.4, 3.0, 2.0);
    CHECK(faber_krahn_lower_bound(case2, lam1) == doctest::Approx(0.8781).epsilon(2e-4));
    const MaterialParams case1 = MaterialParams::isotropic(3.0, 0.7, -2.0);
    CHECK(faber_krahn_lower_bound(case1, lam1) == doctest::Approx(2.4048).epsilon(1e-4));
    CHECK_THROWS_AS(faber_krahn_lower_bound(MaterialParams::isotropic(1.0, 1.0, 0.0), lam1),
                    tev::RegimeError);
    // formula continuity: CaseII bound approaches sqrt(lambda1) as a, n -> 1
    const MaterialParams near1 = MaterialParams::isotropic(1.0 - 1e-9, 1.0 + 1e-9, 1.0);
    CHECK(faber_krahn_lower_bound(near1, lam1) ==
          doctest::Approx(std::sqrt(lam1)).epsilon(1e-8));
    // CaseII bound below CaseI bound whenever a_min/n <= 1
    CHECK(faber_krahn_lower_bound(case2, lam1) < faber_krahn_lower_bound(case1, lam1));
}

TEST_CASE("invalid coefficients are rejected") {
    CHECK_THROWS_AS(MaterialParams::isotropic(-1.0, 1.0, 0.0), tev::ValidationError);
    CHECK_THROWS_AS(MaterialParams::isotropic(1.0, 0.0, 0.0), tev::ValidationError);
    Eigen::Matrix2d indef;
    indef << 1.0, 2.0, 2.0, 1.0;  // eigenvalues -1 and 3
    CHECK_THROWS_AS(MaterialParams::anisotropic(indef, 1.0, 0.0), tev::ValidationError);
}

TEST_CASE("domain spec parsing") {
    CHECK(tev::DomainSpec::parse("square", 2).kind == tev::DomainSpec::Kind::UnitSquare);
    CHECK(tev::DomainSpec::parse("lshape", 0).kind == tev::DomainSpec::Kind::LShape);
    CHECK(tev::DomainSpec::parse("disk", 1).kind == tev::DomainSpec::Kind::UnitDisk);
    CHECK(tev::DomainSpec::parse("mesh:/tmp/m.txt", 0).path == "/tmp/m.txt");
    CHECK_THROWS_AS(tev::DomainSpec::parse("cube", 0), tev::ConfigError);
}
