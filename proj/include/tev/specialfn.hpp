#pragma once

#include <vector>

namespace tev {

// One evaluation of J_m and J'_m at a point.
struct BesselEval {
    int order = 0;
    double argument = 0.0;
    double value = 0.0;
    double derivative = 0.0;
};

// Bessel function of the first kind J_m(x), double precision.
// Working range m in [0, 50], x in [0, 1e3]; RangeError outside.
double bessel_j(int m, double x);

// J'_m(x) via the recurrence (J_{m-1} - J_{m+1})/2, with J'_0 = -J_1.
double bessel_j_prime(int m, double x);

// J_m and J'_m in a single pass (the determinant evaluation wants both).
BesselEval bessel_eval(int m, double x);

// J_0(x) .. J_{m_max}(x) in one downward-recurrence sweep.
std::vector<double> bessel_j_row(int m_max, double x);

// i-th positive zero of J_m (i >= 1), located by bisection to ~1e-13.
double bessel_j_zero(int m, int i);

}  // namespace tev
