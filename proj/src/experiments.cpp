#include "tev/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <tuple>

#include <json.hpp>

#include "tev/errors.hpp"
#include "tev/mesh.hpp"

namespace tev {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
    return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

MaterialParams with_value(const MaterialParams& base, SweepParam param, double value) {
    MaterialParams p = base;
    switch (param) {
        case SweepParam::A: p.a_matrix = value * Eigen::Matrix2d::Identity(); break;
        case SweepParam::N: p.n = value; break;
        case SweepParam::Eta: p.eta = value; break;
    }
    p.validate();
    return p;
}

bool use_analytic(BackendChoice choice, const DomainSpec& domain, const MaterialParams& p) {
    switch (choice) {
        case BackendChoice::Analytic: return true;
        case BackendChoice::Fem: return false;
        default:
            return domain.kind == DomainSpec::Kind::UnitDisk && p.is_isotropic();
    }
}

// One first-TEV solve through whichever backend the config selects. The mesh
// is shared across rows; only the forms depend on the coefficients.
TevResult solve_k1(const DomainSpec& domain, const Mesh* mesh, const MaterialParams& p,
                   bool analytic, double k_max, const RootScanOptions& disk_opts,
                   const FemOptions& fem_opts, std::optional<Regime> regime_override) {
    if (analytic) {
        RootScanOptions o = disk_opts;
        if (regime_override) o.allow_eta_zero = true;
        return first_root(0, p, k_max, o);
    }
    FormSet forms = assemble(*mesh, p, regime_override);
    forms.refinement = domain.refinement;
    FemTevSolver solver(forms, fem_opts);
    return solver.find_first_tev({std::numeric_limits<double>::quiet_NaN(), k_max});
}

}  // namespace

double default_k_max(const DomainSpec& domain) {
    switch (domain.kind) {
        case DomainSpec::Kind::UnitDisk: return 10.0;
        case DomainSpec::Kind::LShape: return 16.0;
        default: return 25.0;
    }
}

void SweepTable::sort_by_key() {
    std::sort(rows.begin(), rows.end(), [](const SweepRow& x, const SweepRow& y) {
        return std::tie(x.domain, x.refinement, x.a, x.n, x.eta) <
               std::tie(y.domain, y.refinement, y.a, y.n, y.eta);
    });
}

namespace {

std::string fmt(double v, const char* spec = "%.12g") {
    char buf[48];
    std::snprintf(buf, sizeof buf, spec, v);
    return buf;
}

// error strings recorded in the backend column may carry commas
std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

void emit(const SweepTable& table, TableFormat format, std::ostream& os) {
    if (format == TableFormat::Csv) {
        os << "a,n,eta,domain,refinement,k1,eoc,backend,residual,runtime_ms\n";
        for (const auto& r : table.rows) {
            os << fmt(r.a) << ',' << fmt(r.n) << ',' << fmt(r.eta) << ',' << r.domain << ','
               << r.refinement << ',' << fmt(r.k1) << ','
               << (r.eoc ? fmt(*r.eoc) : std::string()) << ',' << csv_field(r.backend) << ','
               << fmt(r.residual, "%.6g") << ',' << fmt(r.runtime_ms, "%.3f") << '\n';
        }
        return;
    }
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : table.rows) {
        nlohmann::json j;
        j["a"] = r.a;
        j["n"] = r.n;
        j["eta"] = r.eta;
        j["domain"] = r.domain;
        j["refinement"] = r.refinement;
        j["k1"] = r.k1;
        if (r.eoc)
            j["eoc"] = *r.eoc;
        else
            j["eoc"] = nullptr;
        j["backend"] = r.backend;
        j["residual"] = r.residual;
        j["runtime_ms"] = r.runtime_ms;
        rows.push_back(std::move(j));
    }
    os << rows.dump(2) << '\n';
}

void emit(const SweepTable& table, TableFormat format, const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("emit: cannot open '" + path + "' for writing");
    emit(table, format, os);
    if (!os) throw IoError("emit: write to '" + path + "' failed");
}

SweepTable parse_table_json(std::istream& is) {
    nlohmann::json rows;
    try {
        is >> rows;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("table: ") + e.what(), 0);
    }
    SweepTable table;
    for (const auto& j : rows) {
        SweepRow r;
        r.a = j.at("a").get<double>();
        r.n = j.at("n").get<double>();
        r.eta = j.at("eta").get<double>();
        r.domain = j.at("domain").get<std::string>();
        r.refinement = j.at("refinement").get<int>();
        r.k1 = j.at("k1").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                    : j.at("k1").get<double>();
        if (!j.at("eoc").is_null()) r.eoc = j.at("eoc").get<double>();
        r.backend = j.at("backend").get<std::string>();
        r.residual = j.at("residual").is_null() ? std::numeric_limits<double>::quiet_NaN()
                                                : j.at("residual").get<double>();
        r.runtime_ms = j.at("runtime_ms").get<double>();
        table.rows.push_back(std::move(r));
    }
    return table;
}

SweepOutcome run_monotonicity_sweep(const SweepConfig& config) {
    SweepOutcome out;
    const double k_max =
        std::isfinite(config.k_max) ? config.k_max : default_k_max(config.domain);
    std::optional<Mesh> mesh;
    if (config.backend != BackendChoice::Analytic &&
        !use_analytic(config.backend, config.domain, config.base))
        mesh = generate(config.domain);
    for (double value : config.values) {
        SweepRow row;
        row.domain = config.domain.name();
        row.refinement = config.domain.refinement;
        const auto t0 = Clock::now();
        try {
            const MaterialParams p = with_value(config.base, config.param, value);
            row.a = p.is_isotropic() ? p.scalar_a() : p.a_min();
            row.n = p.n;
            row.eta = p.eta;
            const bool analytic = use_analytic(config.backend, config.domain, p);
            if (!analytic && !mesh) mesh = generate(config.domain);
            const TevResult r = solve_k1(config.domain, mesh ? &*mesh : nullptr, p, analytic,
                                         k_max, config.disk, config.fem, {});
            row.k1 = r.k;
            row.residual = r.residual;
            row.backend = analytic ? "analytic" : "fem";
        } catch (const Error& e) {
            row.backend = std::string("error: ") + e.what();
        }
        row.runtime_ms = ms_since(t0);
        out.table.rows.push_back(std::move(row));
    }

    bool ascending = true, descending = true;
    double prev = std::numeric_limits<double>::quiet_NaN();
    for (const auto& row : out.table.rows) {
        if (!std::isfinite(row.k1)) continue;
        if (std::isfinite(prev)) {
            if (row.k1 < prev) ascending = false;
            if (row.k1 > prev) descending = false;
        }
        prev = row.k1;
    }
    out.verdict = ascending ? "ascending" : (descending ? "descending" : "violated");
    return out;
}

namespace {

double quantize(double v, int decimals) {
    if (decimals < 0 || !std::isfinite(v)) return v;
    const double scale = std::pow(10.0, decimals);
    return std::round(v * scale) / scale;
}

}  // namespace

EocSeries run_eta_limit_study(const EocConfig& config) {
    EocSeries s;
    s.domain = config.domain.name();
    s.refinement = config.domain.refinement;
    const double k_max =
        std::isfinite(config.k_max) ? config.k_max : default_k_max(config.domain);
    const bool analytic = use_analytic(config.backend, config.domain, config.base);
    s.backend = analytic ? "analytic" : "fem";
    const double solver_tol = analytic ? config.disk.tol : config.fem.bisect_tol;
    std::optional<Mesh> mesh;
    if (!analytic) mesh = generate(config.domain);

    for (int p = 0; p <= config.p_max; ++p) {
        const double mag = config.mode == EtaLimitMode::ToZero ? std::ldexp(1.0, -p)
                                                               : std::ldexp(1.0, p);
        const double eta = config.sign * mag;
        s.eta.push_back(eta);
        const auto t0 = Clock::now();
        try {
            MaterialParams prm = config.base;
            prm.eta = eta;
            prm.validate();
            const TevResult r = solve_k1(config.domain, mesh ? &*mesh : nullptr, prm, analytic,
                                         k_max, config.disk, config.fem, {});
            s.k.push_back(quantize(r.k, config.table_decimals));
            s.residuals.push_back(r.residual);
            s.row_errors.emplace_back();
        } catch (const Error& e) {
            s.k.push_back(std::numeric_limits<double>::quiet_NaN());
            s.residuals.push_back(std::numeric_limits<double>::quiet_NaN());
            s.row_errors.emplace_back(e.what());
        }
        s.runtime_ms.push_back(ms_since(t0));
    }

    // Reference value: the eta = 0 problem for to_zero, the nearest Dirichlet
    // candidate for to_inf (both families: sqrt(lambda_j) and
    // sqrt(lambda_j a/n)).
    if (config.k_ref) {
        s.k_ref = quantize(*config.k_ref, config.table_decimals);
        s.ref_kind = "supplied";
    } else if (config.mode == EtaLimitMode::ToZero) {
        MaterialParams prm = config.base;
        prm.eta = 0.0;
        const Regime regime_ov = classify_with_eta_zero_override(prm);
        const TevResult r = solve_k1(config.domain, mesh ? &*mesh : nullptr, prm, analytic,
                                     k_max, config.disk, config.fem, regime_ov);
        s.k_ref = quantize(r.k, config.table_decimals);
        s.ref_kind = "eta0";
    } else {
        std::vector<double> lambdas;
        if (analytic) {
            lambdas = disk_dirichlet_eigenvalues(config.candidate_count);
        } else {
            const FormSet forms = assemble(*mesh, config.base,
                                           classify_with_eta_zero_override(config.base));
            lambdas = dirichlet_eigs(forms, false, config.candidate_count);
        }
        const double ratio = config.base.a_min() / config.base.n;
        std::vector<std::pair<double, int>> cands;  // (value, family 0/1)
        for (double lam : lambdas) {
            cands.emplace_back(std::sqrt(lam), 0);
            cands.emplace_back(std::sqrt(lam * ratio), 1);
        }
        std::sort(cands.begin(), cands.end());
        for (const auto& c : cands) s.candidates.push_back(c.first);

        double k_last = std::numeric_limits<double>::quiet_NaN();
        for (auto it = s.k.rbegin(); it != s.k.rend(); ++it)
            if (std::isfinite(*it)) {
                k_last = *it;
                break;
            }
        if (std::isfinite(k_last) && !cands.empty()) {
            int best = 0;
            for (int i = 1; i < static_cast<int>(cands.size()); ++i)
                if (std::abs(cands[i].first - k_last) < std::abs(cands[best].first - k_last))
                    best = i;
            s.k_ref = quantize(cands[best].first, config.table_decimals);
            s.ref_kind = cands[best].second == 0 ? "sqrt(lambda_j)" : "sqrt(lambda_j a/n)";
            // Half-gap rule: the identified limit must sit closer than half
            // the distance to the next nearest candidate.
            double second = std::numeric_limits<double>::infinity();
            for (int i = 0; i < static_cast<int>(cands.size()); ++i)
                if (i != best) second = std::min(second, std::abs(cands[i].first - k_last));
            const double gap = std::abs(cands[best].first - k_last);
            s.ambiguous = !(gap < 0.5 * second);
        }
        // Branch labels: nearest candidate per row.
        for (double kv : s.k) {
            int b = -1;
            if (std::isfinite(kv) && !cands.empty()) {
                b = 0;
                for (int i = 1; i < static_cast<int>(cands.size()); ++i)
                    if (std::abs(cands[i].first - kv) < std::abs(cands[b].first - kv)) b = i;
            }
            s.branch.push_back(b);
        }
    }
    if (s.branch.empty()) s.branch.assign(s.k.size(), 0);

    // EOC columns. The series stops once |k - k_ref| sinks to the solver
    // tolerance scale; ratios of noise are not rates.
    const double floor = 5.0 * solver_tol;
    s.eoc.assign(s.k.size(), std::numeric_limits<double>::quiet_NaN());
    s.eoc_branch.assign(s.k.size(), std::numeric_limits<double>::quiet_NaN());
    for (std::size_t p = 1; p < s.k.size(); ++p) {
        if (!std::isfinite(s.k[p - 1]) || !std::isfinite(s.k[p]) || !std::isfinite(s.k_ref))
            continue;
        const double e0 = std::abs(s.k[p - 1] - s.k_ref);
        const double e1 = std::abs(s.k[p] - s.k_ref);
        if (e0 < floor || e1 < floor) continue;
        s.eoc[p] = std::log2(e0 / e1);
        if (!s.candidates.empty() && s.branch[p] >= 0 && s.branch[p] == s.branch[p - 1]) {
            const double ref = s.candidates[s.branch[p]];
            const double b0 = std::abs(s.k[p - 1] - ref);
            const double b1 = std::abs(s.k[p] - ref);
            if (b0 >= floor && b1 >= floor) s.eoc_branch[p] = std::log2(b0 / b1);
        }
    }
    return s;
}

SweepTable eoc_to_table(const EocSeries& series, const EocConfig& config) {
    SweepTable table;
    for (std::size_t i = 0; i < series.k.size(); ++i) {
        SweepRow row;
        row.a = config.base.is_isotropic() ? config.base.scalar_a() : config.base.a_min();
        row.n = config.base.n;
        row.eta = series.eta[i];
        row.domain = series.domain;
        row.refinement = series.refinement;
        row.k1 = series.k[i];
        if (std::isfinite(series.eoc[i])) row.eoc = series.eoc[i];
        row.backend = series.row_errors[i].empty() ? series.backend
                                                   : "error: " + series.row_errors[i];
        row.residual = series.residuals[i];
        row.runtime_ms = series.runtime_ms[i];
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace tev
