#include "tev/disk_analytic.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "tev/specialfn.hpp"

namespace tev {

void write_csv(const DetCurve& curve, std::ostream& os) {
    os << "k,d_m\n";
    os.precision(17);
    for (std::size_t i = 0; i < curve.k_grid.size(); ++i)
        os << curve.k_grid[i] << ',' << curve.values[i] << '\n';
}

double det_dm(int m, double k, const MaterialParams& params) {
    const double a = params.scalar_a();  // ShapeError for non-radial media
    const double s = std::sqrt(params.n / a);
    const BesselEval outer = bessel_eval(m, k);
    const BesselEval inner = bessel_eval(m, s * k);
    return inner.value * (-(k * outer.derivative + params.eta * outer.value)) +
           outer.value * (k * std::sqrt(params.n * a) * inner.derivative);
}

DetCurve sample_det(int m, const MaterialParams& params, double k_lo, double k_hi, double step) {
    DetCurve c;
    c.m = m;
    c.step = step;
    const int count = static_cast<int>(std::floor((k_hi - k_lo) / step + 1e-9)) + 1;
    c.k_grid.reserve(count);
    c.values.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double k = k_lo + i * step;
        c.k_grid.push_back(k);
        c.values.push_back(det_dm(m, k, params));
    }
    return c;
}

namespace {

double scan_floor(const MaterialParams& params, const RootScanOptions& opts) {
    if (std::isfinite(opts.k_min)) return opts.k_min;
    const Regime regime = classify_with_eta_zero_override(params);
    if (regime == Regime::Neither) return std::max(opts.grid_step, 1e-3);
    // 10% safety margin: near eta = 0 the configuration sits right on the
    // boundary of the theory and the discrete floor can round either way.
    return std::max(opts.grid_step, 0.9 * faber_krahn_lower_bound(regime, params, disk_lambda1()));
}

double bisect_root(int m, const MaterialParams& params, double lo, double hi, double flo,
                   double tol) {
    for (int it = 0; it < 200 && hi - lo > tol; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = det_dm(m, mid, params);
        if (fm == 0.0) return mid;
        if ((flo < 0.0) != (fm < 0.0)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

}  // namespace

ModeScan scan_mode(int m, const MaterialParams& params, double k_max, const RootScanOptions& opts) {
    ModeScan scan;
    scan.m = m;
    const double k_lo = scan_floor(params, opts);
    scan.curve = sample_det(m, params, k_lo, k_max, opts.grid_step);
    const auto& ks = scan.curve.k_grid;
    const auto& vs = scan.curve.values;

    double curve_max = 0.0;
    for (double v : vs)
        if (std::isfinite(v)) curve_max = std::max(curve_max, std::abs(v));
    if (curve_max <= 1e-14)
        throw DegenerateMedium("disk: d_" + std::to_string(m) +
                               " vanishes identically; medium carries no spectrum");

    for (std::size_t i = 0; i + 1 < ks.size(); ++i) {
        if (!std::isfinite(vs[i]) || !std::isfinite(vs[i + 1])) continue;
        if (vs[i] == 0.0 || (vs[i] < 0.0) == (vs[i + 1] < 0.0)) continue;
        DiskRoot r;
        r.k = bisect_root(m, params, ks[i], ks[i + 1], vs[i], opts.tol);
        r.lo = r.k - 0.5 * opts.tol;
        r.hi = r.k + 0.5 * opts.tol;
        r.residual = std::abs(det_dm(m, r.k, params));
        const double s = std::sqrt(params.n / params.scalar_a());
        r.common_factor = std::abs(bessel_j(m, r.k)) < opts.common_zero_tol &&
                          std::abs(bessel_j(m, s * r.k)) < opts.common_zero_tol;
        scan.roots.push_back(r);
    }

    // Grazing pairs: consecutive crossings whose in-between excursion stays a
    // tiny fraction of the local scale are one near-double contact, the kind
    // of root pair born when an eigenvalue branch touches zero tangentially.
    const int window = 25;
    for (std::size_t i = 0; i + 1 < scan.roots.size(); ++i) {
        if (scan.roots[i].grazing) continue;
        const double r1 = scan.roots[i].k;
        const double r2 = scan.roots[i + 1].k;
        double inner = 0.0, local = 0.0;
        for (std::size_t j = 0; j < ks.size(); ++j) {
            if (!std::isfinite(vs[j])) continue;
            const double k = ks[j];
            if (k > r1 && k < r2) inner = std::max(inner, std::abs(vs[j]));
            if (k > r1 - window * opts.grid_step && k < r2 + window * opts.grid_step)
                local = std::max(local, std::abs(vs[j]));
        }
        if (local > 0.0 && inner < opts.grazing_rel_tol * local) {
            scan.roots[i].grazing = true;
            scan.roots[i + 1].grazing = true;
            ++i;  // the pair is consumed together
        }
    }
    return scan;
}

namespace {

void check_eta_zero_gate(const MaterialParams& params, const RootScanOptions& opts) {
    if (params.eta == 0.0 && !opts.allow_eta_zero)
        throw RegimeError(
            "disk: eta = 0 lies outside both coercivity cases; "
            "set the limit-study override to solve the eta = 0 problem");
}

TevResult to_result(const DiskRoot& r, int m, double grid_step) {
    TevResult t;
    t.k = r.k;
    t.backend = Backend::Analytic;
    t.mode = m;
    t.bracket_lo = r.lo;
    t.bracket_hi = r.hi;
    t.residual = r.residual;
    t.meta = grid_step;
    return t;
}

}  // namespace

TevResult first_root(int m, const MaterialParams& params, double k_max,
                     const RootScanOptions& opts) {
    const ModeScan scan = scan_mode(m, params, k_max, opts);
    check_eta_zero_gate(params, opts);
    for (const auto& r : scan.roots)
        if (!r.grazing && !r.common_factor) return to_result(r, m, opts.grid_step);
    throw NoRootInRange("disk: no clear root of d_" + std::to_string(m) + " in (" +
                        std::to_string(scan.curve.k_grid.front()) + ", " +
                        std::to_string(k_max) + "]");
}

std::vector<TevResult> tev_spectrum(const MaterialParams& params, int m_max, double k_max,
                                    const RootScanOptions& opts) {
    std::vector<TevResult> all;
    int degenerate_modes = 0;
    for (int m = 0; m <= m_max; ++m) {
        ModeScan scan;
        try {
            scan = scan_mode(m, params, k_max, opts);
        } catch (const DegenerateMedium&) {
            ++degenerate_modes;
            continue;
        }
        for (const auto& r : scan.roots)
            if (!r.grazing && !r.common_factor) all.push_back(to_result(r, m, opts.grid_step));
    }
    if (degenerate_modes == m_max + 1)
        throw DegenerateMedium("disk: every mode's determinant vanishes identically");
    check_eta_zero_gate(params, opts);

    std::sort(all.begin(), all.end(), [](const TevResult& a, const TevResult& b) {
        return a.k < b.k || (a.k == b.k && a.mode < b.mode);
    });
    std::vector<TevResult> out;
    for (const auto& r : all) {
        if (!out.empty() && r.k - out.back().k <= 2.0 * opts.tol) continue;
        out.push_back(r);
    }
    return out;
}

double disk_lambda1() {
    static const double lam = [] {
        const double z = bessel_j_zero(0, 1);
        return z * z;
    }();
    return lam;
}

std::vector<double> disk_dirichlet_eigenvalues(int count) {
    if (count < 1) throw RangeError("disk_dirichlet_eigenvalues: count must be >= 1");
    std::vector<double> zs;
    // The count-th smallest zero overall is below (count+1)*pi, and
    // j_{m,1} > m, so higher orders cannot contribute.
    const int m_cap = std::min(static_cast<int>((count + 1) * 3.1415926535897932) + 1, 50);
    for (int m = 0; m <= m_cap; ++m)
        for (int i = 1; i <= count; ++i) zs.push_back(bessel_j_zero(m, i));
    std::sort(zs.begin(), zs.end());
    zs.resize(count);
    for (auto& z : zs) z = z * z;
    return zs;
}

}  // namespace tev
