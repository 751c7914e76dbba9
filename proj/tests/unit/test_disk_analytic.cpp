#include <doctest.h>

#include <cmath>
#include <algorithm>
#include <sstream>

#include "tev/disk_analytic.hpp"
#include "tev/specialfn.hpp"

using namespace tev;

namespace {
const MaterialParams kCase2 = MaterialParams::isotropic(0.4, 3.0, 1.0);
const MaterialParams kCase1 = MaterialParams::isotropic(3.0, 0.7, -1.0);
}  // namespace

TEST_CASE("determinant expansion matches its Bessel building blocks") {
    for (double k : {0.7, 1.3, 2.9, 6.4}) {
        for (int m : {0, 1, 4}) {
            const double a = 0.4, n = 3.0, eta = 1.0;
            const double s = std::sqrt(n / a);
            const double expected =
                bessel_j(m, s * k) * (-(k * bessel_j_prime(m, k) + eta * bessel_j(m, k))) +
                bessel_j(m, k) * (k * std::sqrt(n * a) * bessel_j_prime(m, s * k));
            CHECK(det_dm(m, k, kCase2) == doctest::Approx(expected).epsilon(1e-12));
        }
    }
}

TEST_CASE("degenerate medium: identical coefficients carry no spectrum") {
    const MaterialParams trivial = MaterialParams::isotropic(1.0, 1.0, 0.0);
    for (double k : {0.5, 1.0, 3.7}) CHECK(std::abs(det_dm(0, k, trivial)) < 1e-14);
    RootScanOptions opts;
    opts.allow_eta_zero = true;
    CHECK_THROWS_AS(first_root(0, trivial, 10.0, opts), DegenerateMedium);
    CHECK_THROWS_AS(tev_spectrum(trivial, 5, 10.0, opts), DegenerateMedium);
}

TEST_CASE("anisotropic A is rejected by the radial solver") {
    Eigen::Matrix2d a;
    a << 0.4, 0.1, 0.1, 0.3;
    CHECK_THROWS_AS(det_dm(0, 1.0, MaterialParams::anisotropic(a, 3.0, 1.0)), ShapeError);
}

TEST_CASE("first roots of d_0 reproduce the published disk values") {
    CHECK(std::abs(first_root(0, kCase2, 10.0).k - 1.6010) <= 5e-4);
    CHECK(std::abs(first_root(0, kCase1, 10.0).k - 5.8032) <= 5e-4);
    MaterialParams p = kCase2;
    p.eta = 1.0 / 512.0;
    CHECK(std::abs(first_root(0, p, 10.0).k - 1.7948) <= 5e-4);
    p.eta = 512.0;
    CHECK(std::abs(first_root(0, p, 10.0).k - 0.8788) <= 5e-4);
    MaterialParams q = kCase1;
    q.eta = -512.0;
    CHECK(std::abs(first_root(0, q, 10.0).k - 2.4095) <= 5e-4);
}

TEST_CASE("eta = 0 requires the limit-study override and yields the classical roots") {
    MaterialParams p = kCase2;
    p.eta = 0.0;
    CHECK_THROWS_AS(first_root(0, p, 10.0), RegimeError);
    RootScanOptions opts;
    opts.allow_eta_zero = true;
    CHECK(std::abs(first_root(0, p, 10.0, opts).k - 1.7950) <= 5e-4);
    MaterialParams q = kCase1;
    q.eta = 0.0;
    CHECK(std::abs(first_root(0, q, 10.0, opts).k - 5.8267) <= 5e-4);
}

TEST_CASE("result metadata: bracket encloses the root at the requested tolerance") {
    const TevResult r = first_root(0, kCase2, 10.0);
    CHECK(r.bracket_lo < r.k);
    CHECK(r.k < r.bracket_hi);
    CHECK(r.bracket_hi - r.bracket_lo <= 1.0001e-6);
    CHECK(r.residual < 1e-5);
    CHECK(r.backend == Backend::Analytic);
    CHECK(r.mode == 0);
}

TEST_CASE("grazing pair: the shallow double contact is reported, not returned") {
    MaterialParams p = kCase1;
    p.eta = -8.0;
    // the true curve dips barely below zero near k = 3.2; the first clear
    // crossing is the one a coarse published table sees
    const TevResult r = first_root(0, p, 10.0);
    CHECK(std::abs(r.k - 5.7124) <= 5e-4);
    const ModeScan scan = scan_mode(0, p, 10.0, RootScanOptions{});
    int grazing = 0;
    for (const auto& root : scan.roots)
        if (root.grazing) {
            ++grazing;
            CHECK(root.k > 3.1);
            CHECK(root.k < 3.3);
        }
    CHECK(grazing == 2);
}

TEST_CASE("spectrum scan collects modes in ascending order") {
    const auto spectrum = tev_spectrum(kCase2, 10, 3.0);
    REQUIRE(!spectrum.empty());
    CHECK(std::abs(spectrum.front().k - 1.6010) <= 5e-4);
    CHECK(spectrum.front().mode == 0);
    for (std::size_t i = 1; i < spectrum.size(); ++i)
        CHECK(spectrum[i].k > spectrum[i - 1].k);
    // the m = 1 branch contributes its first root just above the m = 0 one
    bool has_m1 = false;
    for (const auto& r : spectrum)
        if (r.mode == 1 && std::abs(r.k - 1.7592) < 5e-3) has_m1 = true;
    CHECK(has_m1);
}

TEST_CASE("roots increase monotonically as eta decreases to zero in CaseII") {
    double prev = 0.0;
    for (double eta : {1.0, 0.5, 0.25, 0.125}) {
        MaterialParams p = kCase2;
        p.eta = eta;
        const double k = first_root(0, p, 10.0).k;
        CHECK(k > prev);
        prev = k;
    }
}

TEST_CASE("disk Dirichlet eigenvalues are squared Bessel zeros") {
    const auto lams = disk_dirichlet_eigenvalues(4);
    REQUIRE(lams.size() == 4);
    CHECK(std::sqrt(lams[0]) == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(std::sqrt(lams[1]) == doctest::Approx(3.831705970207512).epsilon(1e-12));
    for (std::size_t i = 1; i < lams.size(); ++i) CHECK(lams[i] > lams[i - 1]);
    CHECK(disk_lambda1() == doctest::Approx(lams[0]).epsilon(1e-14));
}

TEST_CASE("determinant curve CSV emission") {
    const DetCurve c = sample_det(0, kCase2, 1.0, 1.1, 0.05);
    std::ostringstream os;
    write_csv(c, os);
    const std::string text = os.str();
    CHECK(text.rfind("k,d_m\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 4);  // header + 3 samples
}

TEST_CASE("no root in range raises after a clean scan") {
    CHECK_THROWS_AS(first_root(0, kCase2, 1.2), NoRootInRange);
}
