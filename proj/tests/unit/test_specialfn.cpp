#include <doctest.h>

#include <cmath>
#include <random>

#include "tev/errors.hpp"
#include "tev/specialfn.hpp"

using tev::bessel_eval;
using tev::bessel_j;
using tev::bessel_j_prime;
using tev::bessel_j_row;
using tev::bessel_j_zero;

namespace {

// Reference oracle: the defining power series in extended precision with its
// own termination rule. Trustworthy to ~1e-15 relative for x <= 12.
long double oracle_series_j(int m, long double x) {
    const long double h = 0.5L * x;
    long double term = 1.0L;
    for (int i = 1; i <= m; ++i) term *= h / i;
    long double sum = term;
    const long double q = h * h;
    for (int j = 1; j <= 200; ++j) {
        term *= -q / (static_cast<long double>(j) * (m + j));
        sum += term;
        if (std::abs(term) < 1e-24L * std::abs(sum) && j > 8) break;
    }
    return sum;
}

double oracle_bisect(int m, double lo, double hi) {
    long double flo = oracle_series_j(m, lo);
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
        const double mid = 0.5 * (lo + hi);
        const long double fm = oracle_series_j(m, mid);
        if ((flo < 0.0L) != (fm < 0.0L))
            hi = mid;
        else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("values at zero are exact") {
    CHECK(bessel_j(0, 0.0) == 1.0);
    CHECK(bessel_j(1, 0.0) == 0.0);
    CHECK(bessel_j(7, 0.0) == 0.0);
    CHECK(bessel_j_prime(0, 0.0) == 0.0);
    CHECK(bessel_j_prime(1, 0.0) == 0.5);
}

TEST_CASE("first zero of J_0 from the series oracle") {
    const double z = oracle_bisect(0, 2.0, 3.0);
    CHECK(z == doctest::Approx(2.404825557695773).epsilon(1e-14));
    CHECK(std::abs(bessel_j(0, z)) < 1e-12);
    CHECK(std::abs(bessel_j(0, 2.404825557695773)) < 1e-12);
}

TEST_CASE("agreement with the series oracle over the series and recurrence regions") {
    for (int m : {0, 1, 2, 5, 11, 23, 50}) {
        for (double x : {1e-8, 0.3, 1.7, 4.0, 7.9, 9.5, 12.0}) {
            const double ref = static_cast<double>(oracle_series_j(m, x));
            const double got = bessel_j(m, x);
            CHECK(std::abs(got - ref) <= 1e-12 * std::max(1e-3, std::abs(ref)));
        }
    }
}

TEST_CASE("squared Neumann sum: J_0^2 + 2 sum J_m^2 = 1") {
    for (double x : {0.5, 2.0, 7.7, 13.1, 20.0}) {
        const auto row = bessel_j_row(50, x);
        double s = row[0] * row[0];
        for (int m = 1; m <= 50; ++m) s += 2.0 * row[m] * row[m];
        CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("cross-library agreement at large arguments") {
    for (int m : {0, 3, 17, 50}) {
        for (double x : {25.0, 121.5, 487.0, 1000.0}) {
            const double ref = std::cyl_bessel_j(static_cast<double>(m), x);
            CHECK(std::abs(bessel_j(m, x) - ref) < 1e-10);
        }
    }
}

TEST_CASE("three-term recurrence holds for random orders and arguments") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> xs(0.2, 900.0);
    std::uniform_int_distribution<int> ms(1, 49);
    for (int trial = 0; trial < 200; ++trial) {
        const int m = ms(rng);
        const double x = xs(rng);
        const auto row = bessel_j_row(m + 1, x);
        const double lhs = row[m - 1] + row[m + 1];
        const double rhs = (2.0 * m / x) * row[m];
        const double scale = std::max({1.0, std::abs(lhs), std::abs(rhs)});
        CHECK(std::abs(lhs - rhs) <= 1e-10 * scale);
    }
}

TEST_CASE("derivative identities") {
    for (double x : {0.4, 1.9, 6.2, 14.8, 33.0}) {
        CHECK(bessel_j_prime(0, x) == doctest::Approx(-bessel_j(1, x)).epsilon(1e-14));
        const auto e = bessel_eval(3, x);
        CHECK(e.value == doctest::Approx(bessel_j(3, x)).epsilon(1e-14));
        CHECK(e.derivative == doctest::Approx(bessel_j_prime(3, x)).epsilon(1e-14));
    }
    // leading series behavior of J'_2
    CHECK(bessel_j_prime(2, 1e-3) == doctest::Approx(2.5e-4).epsilon(1e-6));
}

TEST_CASE("derivative matches central finite differences at O(h^2)") {
    for (int m : {0, 1, 2, 5, 9}) {
        for (double x : {0.7, 3.3, 9.1, 17.6}) {
            for (double h : {1e-4, 1e-5}) {
                const double fd = (bessel_j(m, x + h) - bessel_j(m, x - h)) / (2.0 * h);
                const double err = std::abs(bessel_j_prime(m, x) - fd);
                CHECK(err <= 1.0 * h * h + 1e-11);
            }
        }
    }
}

TEST_CASE("first zero of J'_1 located through the recurrence form") {
    // root of (J_0 - J_2)/2 by bisection on the oracle series
    double lo = 1.0, hi = 2.5;
    auto g = [](double x) {
        return 0.5 * static_cast<double>(oracle_series_j(0, x) - oracle_series_j(2, x));
    };
    double glo = g(lo);
    for (int it = 0; it < 100 && hi - lo > 1e-13; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double gm = g(mid);
        if ((glo < 0.0) != (gm < 0.0))
            hi = mid;
        else {
            lo = mid;
            glo = gm;
        }
    }
    const double z = 0.5 * (lo + hi);
    CHECK(z == doctest::Approx(1.8411837813406593).epsilon(1e-10));
    CHECK(std::abs(bessel_j_prime(1, z)) < 1e-10);
}

TEST_CASE("bessel_j_zero finds tabulated zeros") {
    CHECK(bessel_j_zero(0, 1) == doctest::Approx(2.404825557695773).epsilon(1e-12));
    CHECK(bessel_j_zero(0, 2) == doctest::Approx(5.520078110286311).epsilon(1e-12));
    CHECK(bessel_j_zero(1, 1) == doctest::Approx(3.831705970207512).epsilon(1e-12));
}

TEST_CASE("working-range violations raise RangeError") {
    CHECK_THROWS_AS(bessel_j(-1, 1.0), tev::RangeError);
    CHECK_THROWS_AS(bessel_j(51, 1.0), tev::RangeError);
    CHECK_THROWS_AS(bessel_j(0, -0.5), tev::RangeError);
    CHECK_THROWS_AS(bessel_j(0, 1.0e3 + 1.0), tev::RangeError);
}

TEST_CASE("values stay bounded by one") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> xs(0.0, 1000.0);
    std::uniform_int_distribution<int> ms(0, 50);
    for (int trial = 0; trial < 300; ++trial)
        CHECK(std::abs(bessel_j(ms(rng), xs(rng))) <= 1.0 + 1e-14);
}
