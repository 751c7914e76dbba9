#pragma once

#include <iosfwd>
#include <limits>
#include <vector>

#include "tev/params.hpp"
#include "tev/result.hpp"

namespace tev {

// Samples of the determinant d_m(k) on a uniform grid.
struct DetCurve {
    int m = 0;
    double step = 0.0;
    std::vector<double> k_grid;
    std::vector<double> values;
};

// Two-column CSV (k, d_m).
void write_csv(const DetCurve& curve, std::ostream& os);

struct RootScanOptions {
    // Left end of the scan; NaN selects 0.9 x the Faber-Krahn floor (or a
    // small positive floor when no regime applies).
    double k_min = std::numeric_limits<double>::quiet_NaN();
    double grid_step = 0.01;  // keeps >= 20 samples per Bessel oscillation for k_max <= 20
    double tol = 1e-6;        // final bisection bracket width
    // A sign-change pair whose dip between the two crossings never exceeds
    // this fraction of the local curve scale is treated as a grazing
    // (near-double) contact and excluded from the clear-root list.
    double grazing_rel_tol = 0.02;
    // Roots where J_m(k) and J_m(sqrt(n/a) k) vanish simultaneously are a
    // common factor of the determinant, not eigenvalue information.
    double common_zero_tol = 1e-8;
    // eta = 0 sits outside both coercivity cases; limit studies opt in here.
    bool allow_eta_zero = false;
};

// One bracketed root of d_m, before filtering.
struct DiskRoot {
    double k = 0.0;
    double lo = 0.0, hi = 0.0;
    double residual = 0.0;
    bool grazing = false;
    bool common_factor = false;
};

// Full scan diagnostics for one mode.
struct ModeScan {
    int m = 0;
    DetCurve curve;
    std::vector<DiskRoot> roots;  // ascending, including flagged entries
};

// The 2x2 boundary-matching determinant for the unit disk, expanded as
//   J_m(sk) * (-(k J'_m(k) + eta J_m(k))) + J_m(k) * k sqrt(na) J'_m(sk)
// with s = sqrt(n/a). ShapeError unless A = aI.
double det_dm(int m, double k, const MaterialParams& params);

// d_m sampled on [k_lo, k_hi] with the given step.
DetCurve sample_det(int m, const MaterialParams& params, double k_lo, double k_hi, double step);

// Scan + bisection with grazing/common-factor classification.
// DegenerateMedium when the curve is identically below 1e-14.
ModeScan scan_mode(int m, const MaterialParams& params, double k_max, const RootScanOptions& opts);

// First clear root of d_m in (0, k_max]. NoRootInRange when no clear crossing
// exists; RegimeError when eta = 0 without the limit-study override.
TevResult first_root(int m, const MaterialParams& params, double k_max,
                     const RootScanOptions& opts = {});

// All clear roots over m = 0..m_max, ascending, deduplicated at 2*tol.
std::vector<TevResult> tev_spectrum(const MaterialParams& params, int m_max, double k_max,
                                    const RootScanOptions& opts = {});

// Smallest `count` Dirichlet eigenvalues of -Laplace on the unit disk,
// i.e. squared Bessel zeros j_{m,i}^2 in ascending order.
std::vector<double> disk_dirichlet_eigenvalues(int count);

// First Dirichlet eigenvalue j_{0,1}^2 (cached).
double disk_lambda1();

}  // namespace tev
