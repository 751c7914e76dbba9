#include "tev/tev_fem.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <thread>

#include "tev/errors.hpp"

namespace tev {

LkOperator::LkOperator(const FormSet& forms, double k)
    : k_(k),
      sigma_(regime_sign(forms.regime)),
      k_u_((forms.S_A.plus(forms.M_n, -k * k)).restricted(forms.interior)),
      c_(rhs_matrix(forms, k)),
      g_(aux_matrix(forms, k).scaled(sigma_)) {}

Eigen::VectorXd LkOperator::apply(const Eigen::VectorXd& u) const {
    const Eigen::VectorXd cu = c_ * u;
    const Eigen::VectorXd gcu = g_.solve(cu);
    return sigma_ * (k_u_.apply(u) + sigma_ * (c_.transpose() * gcu));
}

Eigen::VectorXd LkOperator::solve_aux(const Eigen::VectorXd& u) const {
    // G_k^{-1} = sigma (sigma G_k)^{-1}
    return sigma_ * g_.solve(c_ * u);
}

void write_csv(const SignScan& scan, std::ostream& os) {
    os << "k,f\n";
    os.precision(17);
    for (std::size_t i = 0; i < scan.k_grid.size(); ++i)
        os << scan.k_grid[i] << ',' << scan.f_values[i] << '\n';
}

FemTevSolver::FemTevSolver(FormSet forms, FemOptions opts)
    : forms_(std::move(forms)), opts_(opts) {
    if (opts_.weight == PencilWeight::Mass) {
        weight_ = forms_.M.restricted(forms_.interior);
    } else {
        weight_ = forms_.S.plus(forms_.M).restricted(forms_.interior);
    }
    // One SPD stiffness-like matrix preconditions sigma Q_k for every k: the
    // high-frequency behavior of the operator is k-independent.
    precond_ = std::make_unique<SpdFactor>(
        forms_.S_A.plus(forms_.M_n).restricted(forms_.interior));
}

double FemTevSolver::lambda1() {
    if (!std::isfinite(lambda1_)) lambda1_ = dirichlet_eigs(forms_, false, 1).front();
    return lambda1_;
}

double FemTevSolver::default_k_lo() {
    return 0.9 * faber_krahn_lower_bound(forms_.regime, forms_.params, lambda1());
}

double FemTevSolver::f(double k) { return f_impl(k, opts_.scan_eig_tol, true); }

double FemTevSolver::f(double k, double eig_tol) { return f_impl(k, eig_tol, true); }

double FemTevSolver::f_impl(double k, double eig_tol, bool allow_warm) {
    LkOperator op(forms_, k);
    EigOptions eo;
    eo.tol = eig_tol;
    eo.max_iter = opts_.eig_max_iter;
    // Two iterate vectors: along a k sweep the minimal branch is overtaken by
    // incoming branches, and a single warm vector sitting on the stale branch
    // is a converged eigenpair the solver would accept. The companion vector
    // plus a two-iteration floor lets the dipping branch enter the subspace.
    eo.block = 2;
    eo.preconditioner = [this](const Eigen::VectorXd& r) { return precond_->solve(r); };
    if (allow_warm && warm_.rows() == op.dim()) {
        eo.initial_guess = warm_;
        eo.min_iter = 2;
    }
    eo.final_block = &warm_;
    auto apply = [&op](const Eigen::VectorXd& u) { return op.apply(u); };
    EigResult res;
    try {
        res = smallest_eig(apply, weight_, op.dim(), eo);
    } catch (const NoConvergence&) {
        // cold restart with a wider block before giving up
        eo.initial_guess.reset();
        eo.min_iter = 1;
        eo.block = 3;
        eo.max_iter = 2 * opts_.eig_max_iter;
        res = smallest_eig(apply, weight_, op.dim(), eo);
    }
    return res.value;
}

namespace {

bool sign_flip(double a, double b) { return (a < 0.0) != (b < 0.0); }

TevResult make_result(double k, double lo, double hi, double residual, int refinement) {
    TevResult t;
    t.k = k;
    t.backend = Backend::Fem;
    t.mode = -1;
    t.bracket_lo = lo;
    t.bracket_hi = hi;
    t.residual = residual;
    t.meta = refinement;
    return t;
}

}  // namespace

double FemTevSolver::bisect(double lo, double hi, double flo) {
    while (hi - lo > opts_.bisect_tol) {
        const double mid = 0.5 * (lo + hi);
        const double fm = f_impl(mid, opts_.eig_tol, true);
        if (fm == 0.0) return mid;
        if (sign_flip(flo, fm)) {
            hi = mid;
        } else {
            lo = mid;
            flo = fm;
        }
    }
    return 0.5 * (lo + hi);
}

FemScanOutcome FemTevSolver::scan_range(double k_lo, double k_hi, int max_count,
                                        bool stop_at_first) {
    if (!(k_hi > k_lo)) throw ConfigError("tev_fem: empty scan bracket");
    FemScanOutcome out;
    auto& ks = out.scan.k_grid;
    auto& fs = out.scan.f_values;
    const int n_grid = static_cast<int>(std::floor((k_hi - k_lo) / opts_.scan_step + 1e-9)) + 1;

    auto eval_grid_point = [&](int i) {
        const double k = k_lo + i * opts_.scan_step;
        try {
            return f_impl(k, opts_.scan_eig_tol, true);
        } catch (const FactorizationError& e) {
            throw FactorizationError(std::string(e.what()) + " at k = " + std::to_string(k));
        }
    };

    const int threads = std::max(1, opts_.threads);
    if (threads > 1 && !stop_at_first) {
        // Chunked parallel sweep; each worker warm-starts within its chunk.
        ks.resize(n_grid);
        fs.resize(n_grid);
        std::vector<std::thread> pool;
        std::exception_ptr first_error;
        std::mutex err_mutex;
        const int chunk = (n_grid + threads - 1) / threads;
        for (int t = 0; t < threads; ++t) {
            pool.emplace_back([&, t]() {
                FemTevSolver local(forms_, opts_);
                local.lambda1_ = lambda1_;
                for (int i = t * chunk; i < std::min(n_grid, (t + 1) * chunk); ++i) {
                    const double k = k_lo + i * opts_.scan_step;
                    try {
                        fs[i] = local.f_impl(k, opts_.scan_eig_tol, true);
                        ks[i] = k;
                    } catch (...) {
                        std::lock_guard<std::mutex> lock(err_mutex);
                        if (!first_error) first_error = std::current_exception();
                        return;
                    }
                }
            });
        }
        for (auto& th : pool) th.join();
        if (first_error) std::rethrow_exception(first_error);
    } else {
        ks.reserve(n_grid);
        fs.reserve(n_grid);
    }

    auto value_at = [&](int i) {
        if (i < static_cast<int>(fs.size())) return fs[i];
        while (static_cast<int>(fs.size()) <= i) {
            const int j = static_cast<int>(fs.size());
            ks.push_back(k_lo + j * opts_.scan_step);
            double v = eval_grid_point(j);
            // Guard against eigensolver misconvergence: a jump an order of
            // magnitude beyond the local secant slope gets one cold retry.
            if (j >= 2) {
                const double slope = std::abs(fs[j - 1] - fs[j - 2]);
                const double floor = 1e-3 * std::max({std::abs(fs[j - 1]), std::abs(fs[j - 2]),
                                                      1e-30});
                if (std::abs(v - fs[j - 1]) > 10.0 * std::max(slope, floor)) {
                    warm_.resize(0, 0);
                    const double retry = f_impl(ks[j], opts_.eig_tol, false);
                    v = retry;
                }
            }
            fs.push_back(v);
        }
        return fs[i];
    };

    if (value_at(0) < 0.0)
        throw NoRootInRange("tev_fem: f is negative at the scan start k = " +
                            std::to_string(k_lo) + "; the bracket misses the first crossing");

    const int window = opts_.grazing_window;

    // Non-crossing dips hugging zero (even-multiplicity contacts) over the
    // evaluated part of the grid; runs on every exit path.
    auto collect_dips = [&]() {
        for (int j = 1; j + 1 < static_cast<int>(fs.size()); ++j) {
            const double a = std::abs(fs[j - 1]), b = std::abs(fs[j]), c = std::abs(fs[j + 1]);
            if (b >= a || b >= c) continue;
            if (sign_flip(fs[j - 1], fs[j]) || sign_flip(fs[j], fs[j + 1])) continue;
            double local = 0.0;
            for (int t = std::max(0, j - window);
                 t <= std::min(static_cast<int>(fs.size()) - 1, j + window); ++t)
                local = std::max(local, std::abs(fs[t]));
            if (local > 0.0 && b < opts_.near_tol_rel * local)
                out.near_roots.push_back(
                    make_result(ks[j], ks[j - 1], ks[j + 1], b, forms_.refinement));
        }
        std::sort(out.near_roots.begin(), out.near_roots.end(),
                  [](const TevResult& x, const TevResult& y) { return x.k < y.k; });
    };

    int i = 0;
    while (i + 1 < n_grid) {
        const double f0 = value_at(i), f1 = value_at(i + 1);
        if (!sign_flip(f0, f1)) {
            ++i;
            continue;
        }
        out.scan.sign_changes.emplace_back(ks[i], ks[i + 1]);
        // Look ahead for a quick re-crossing: a shallow dip is one grazing
        // contact, not two roots.
        int back = -1;
        for (int j = i + 1; j + 1 < n_grid && j <= i + window; ++j) {
            if (sign_flip(value_at(j), value_at(j + 1))) {
                back = j;
                break;
            }
        }
        bool grazing = false;
        if (back >= 0) {
            double inner = 0.0, local = 0.0;
            for (int j = i + 1; j <= back; ++j) inner = std::max(inner, std::abs(value_at(j)));
            for (int j = std::max(0, i - window);
                 j <= std::min(n_grid - 1, back + window); ++j)
                local = std::max(local, std::abs(value_at(j)));
            grazing = local > 0.0 && inner < opts_.grazing_rel_tol * local;
        }
        if (grazing) {
            out.scan.sign_changes.emplace_back(ks[back], ks[back + 1]);
            const double k_touch = 0.5 * (ks[i + 1] + ks[back]);
            out.near_roots.push_back(
                make_result(k_touch, ks[i], ks[back + 1], 0.0, forms_.refinement));
            i = back + 1;
            continue;
        }
        const double root = bisect(ks[i], ks[i + 1], f0);
        const double res = std::abs(f_impl(root, opts_.eig_tol, true));
        out.roots.push_back(make_result(root, root - 0.5 * opts_.bisect_tol,
                                        root + 0.5 * opts_.bisect_tol, res,
                                        forms_.refinement));
        if (stop_at_first || static_cast<int>(out.roots.size()) >= max_count) {
            collect_dips();
            return out;
        }
        ++i;
    }

    collect_dips();
    return out;
}

TevResult FemTevSolver::find_first_tev(std::pair<double, double> k_bracket) {
    double k_lo = k_bracket.first;
    if (!std::isfinite(k_lo)) k_lo = default_k_lo();
    FemScanOutcome out = scan_range(k_lo, k_bracket.second, 1, opts_.threads <= 1);
    if (out.roots.empty())
        throw NoRootInRange("tev_fem: no clear sign change of f in (" + std::to_string(k_lo) +
                            ", " + std::to_string(k_bracket.second) + "]");
    return out.roots.front();
}

FemScanOutcome FemTevSolver::find_tevs_in_range(std::pair<double, double> k_bracket,
                                                int max_count) {
    double k_lo = k_bracket.first;
    if (!std::isfinite(k_lo)) k_lo = default_k_lo();
    return scan_range(k_lo, k_bracket.second, max_count, false);
}

double f_of_k(const FormSet& forms, double k, double eig_tol, PencilWeight weight) {
    FemOptions opts;
    opts.weight = weight;
    FemTevSolver solver(forms, opts);
    return solver.f(k, eig_tol);
}

TevResult find_first_tev(const FormSet& forms, std::pair<double, double> k_bracket,
                         const FemOptions& opts) {
    FemTevSolver solver(forms, opts);
    return solver.find_first_tev(k_bracket);
}

FemScanOutcome find_tevs_in_range(const FormSet& forms, std::pair<double, double> k_bracket,
                                  const FemOptions& opts, int max_count) {
    FemTevSolver solver(forms, opts);
    return solver.find_tevs_in_range(k_bracket, max_count);
}

}  // namespace tev
