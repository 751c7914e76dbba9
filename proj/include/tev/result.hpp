#pragma once

namespace tev {

// Which solver located an eigenvalue.
enum class Backend { Analytic, Fem };

// A located transmission eigenvalue with solver metadata.
struct TevResult {
    double k = 0.0;
    Backend backend = Backend::Analytic;
    int mode = -1;             // Bessel order m for the analytic backend, -1 for FEM
    double bracket_lo = 0.0;   // final bisection bracket, bracket_lo < k < bracket_hi
    double bracket_hi = 0.0;
    double residual = 0.0;     // |d_m(k)| or |f(k)| at the returned k
    double meta = 0.0;         // grid step (analytic) or mesh refinement level (FEM)
};

}  // namespace tev
