#include "tev/specialfn.hpp"

#include <cmath>
#include <limits>

#include "tev/errors.hpp"

namespace tev {

namespace {

constexpr int kMaxOrder = 50;
constexpr double kMaxArgument = 1e3;
// Below this argument every row entry comes from the power series; above it
// the alternating series starts losing digits to cancellation and the
// downward recurrence takes over.
constexpr double kSeriesCutoff = 8.0;

void check_range(int m, double x, int order_slack = 0) {
    if (m < 0 || m > kMaxOrder + order_slack)
        throw RangeError("bessel_j: order " + std::to_string(m) + " outside [0, 50]");
    if (!(x >= 0.0) || x > kMaxArgument)
        throw RangeError("bessel_j: argument outside [0, 1e3]");
}

// Power series sum_j (-1)^j (x/2)^{m+2j} / (j! (m+j)!), for x <= kSeriesCutoff.
double series_j(int m, double x) {
    const double h = 0.5 * x;
    double term = 1.0;
    for (int i = 1; i <= m; ++i) term *= h / i;  // (x/2)^m / m!
    const double q = h * h;
    double sum = term;
    for (int j = 1; j <= 64; ++j) {
        term *= -q / (static_cast<double>(j) * (m + j));
        sum += term;
        if (std::abs(term) <= 0.5 * std::numeric_limits<double>::epsilon() * std::abs(sum))
            break;
    }
    return sum;
}

// Downward (Miller) recurrence normalized by the Neumann sum
// J_0 + 2 J_2 + 2 J_4 + ... = 1. Accurate for any x in range once the start
// order sits far enough above both m_max and x.
std::vector<double> miller_row(int m_max, double x) {
    std::vector<double> out(m_max + 1, 0.0);
    // The start order must sit deep in the decay region: J_s(x) falls off like
    // (e x / 2s)^s once s > 1.36 x, so 1.5 x plus padding keeps the seed error
    // below 1e-20 relative for the whole working range.
    int start = std::max(m_max, static_cast<int>(std::ceil(1.5 * x))) + 30;
    if (start % 2 != 0) ++start;

    double fp = 0.0;     // J_{i+1}, unnormalized
    double f = 1e-220;   // J_i
    double norm = 0.0;
    for (int i = start; i >= 1; --i) {
        const double fm = (2.0 * i / x) * f - fp;  // J_{i-1}
        fp = f;
        f = fm;
        const int idx = i - 1;
        if (idx <= m_max) out[idx] = f;
        if (idx > 0 && idx % 2 == 0) norm += 2.0 * f;
        if (std::abs(f) > 1e250) {
            const double s = 1e-250;
            f *= s;
            fp *= s;
            norm *= s;
            for (int j = idx; j <= m_max; ++j) out[j] *= s;
        }
    }
    norm += f;  // + J_0
    for (auto& v : out) v /= norm;
    return out;
}

std::vector<double> row(int m_max, double x) {
    std::vector<double> out(m_max + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    if (x <= kSeriesCutoff) {
        for (int m = 0; m <= m_max; ++m) out[m] = series_j(m, x);
        return out;
    }
    return miller_row(m_max, x);
}

}  // namespace

std::vector<double> bessel_j_row(int m_max, double x) {
    check_range(m_max, x, /*order_slack=*/1);
    return row(m_max, x);
}

double bessel_j(int m, double x) {
    check_range(m, x);
    return row(m, x)[m];
}

double bessel_j_prime(int m, double x) {
    check_range(m, x);
    if (x == 0.0) return m == 1 ? 0.5 : 0.0;
    const auto r = row(m + 1, x);
    if (m == 0) return -r[1];
    return 0.5 * (r[m - 1] - r[m + 1]);
}

BesselEval bessel_eval(int m, double x) {
    check_range(m, x);
    BesselEval e;
    e.order = m;
    e.argument = x;
    if (x == 0.0) {
        e.value = (m == 0) ? 1.0 : 0.0;
        e.derivative = (m == 1) ? 0.5 : 0.0;
        return e;
    }
    const auto r = row(m + 1, x);
    e.value = r[m];
    e.derivative = (m == 0) ? -r[1] : 0.5 * (r[m - 1] - r[m + 1]);
    return e;
}

double bessel_j_zero(int m, int i) {
    if (i < 1) throw RangeError("bessel_j_zero: index must be >= 1");
    check_range(m, 0.0);
    // Zeros of J_m are simple and separated by more than 2; a 0.05 grid from
    // just below the first one cannot step over any of them.
    double x = std::max(0.5, static_cast<double>(m));
    const double step = 0.05;
    double prev = bessel_j(m, x);
    int found = 0;
    while (x < kMaxArgument) {
        const double xn = x + step;
        const double cur = bessel_j(m, xn);
        if ((prev < 0.0) != (cur < 0.0)) {
            ++found;
            if (found == i) {
                double lo = x, hi = xn, flo = prev;
                for (int it = 0; it < 100 && hi - lo > 1e-14; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_j(m, mid);
                    if ((flo < 0.0) != (fm < 0.0)) {
                        hi = mid;
                    } else {
                        lo = mid;
                        flo = fm;
                    }
                }
                return 0.5 * (lo + hi);
            }
        }
        prev = cur;
        x = xn;
    }
    throw RangeError("bessel_j_zero: zero index outside the working range");
}

}  // namespace tev
