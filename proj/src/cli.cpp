#include "tev/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <algorithm>
#include <optional>
#include <set>

#include "tev/disk_analytic.hpp"
#include "tev/eig_engine.hpp"
#include "tev/experiments.hpp"
#include "tev/mesh.hpp"
#include "tev/tev_fem.hpp"

namespace tev::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Flat key=value run configuration, interchangeable with flags; explicit
// flags win on conflict. Lines starting with '#' are comments.
std::string config_path_placeholder;

void add_config_option(CLI::App* cmd) {
    cmd->add_option("--config", config_path_placeholder,
                    "flat key=value config file (flags win on conflict)");
}

// Writes the effective run configuration back out in the same flat grammar;
// feeding the dump back through --config reproduces the run.
std::shared_ptr<std::string> add_dump_option(CLI::App* cmd) {
    auto path = std::make_shared<std::string>();
    cmd->add_option("--dump-config", *path, "write the canonical effective config here");
    return path;
}

void maybe_dump_config(CLI::App* cmd, const std::string& path) {
    if (path.empty()) return;
    std::ofstream os(path, std::ios::binary);
    if (!os) throw IoError("cli: cannot open '" + path + "' for writing");
    for (const CLI::Option* opt : cmd->get_options()) {
        if (opt->get_lnames().empty()) continue;
        const std::string& name = opt->get_lnames().front();
        if (name == "config" || name == "dump-config" || name == "help") continue;
        std::string value;
        if (!opt->results().empty()) {
            for (const auto& r : opt->results()) {
                if (!value.empty()) value += ',';
                value += r;
            }
        } else {
            value = opt->get_default_str();
        }
        if (value.empty()) continue;
        os << name << '=' << value << '\n';
    }
}

std::vector<std::string> expand_config_args(const std::vector<std::string>& tokens) {
    std::string path;
    std::vector<std::string> out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const std::string& t = tokens[i];
        if (t == "--config") {
            if (i + 1 >= tokens.size()) throw ConfigError("cli: --config needs a path");
            path = tokens[++i];
        } else if (t.rfind("--config=", 0) == 0) {
            path = t.substr(9);
        } else {
            out.push_back(t);
        }
    }
    if (path.empty()) return out;

    std::set<std::string> given;
    for (const auto& t : out)
        if (t.rfind("--", 0) == 0) given.insert(t.substr(0, t.find('=')));

    std::ifstream is(path);
    if (!is) throw ConfigError("cli: cannot open config file '" + path + "'");
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::size_t begin = line.find_first_not_of(" \t");
        if (begin == std::string::npos || line[begin] == '#') continue;
        const std::size_t eq = line.find('=', begin);
        if (eq == std::string::npos)
            throw ParseError("cli: config line is not key=value", line_no);
        auto trim = [](std::string v) {
            const auto a = v.find_first_not_of(" \t");
            const auto b = v.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : v.substr(a, b - a + 1);
        };
        const std::string key = trim(line.substr(begin, eq - begin));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ParseError("cli: empty key in config", line_no);
        if (given.count("--" + key)) continue;  // explicit flag wins
        out.push_back("--" + key + "=" + value);
    }
    return out;
}

struct MaterialOpts {
    double a = 1.0, n = 1.0, eta = 0.0;

    MaterialParams params() const { return MaterialParams::isotropic(a, n, eta); }

    void attach(CLI::App* app) {
        app->add_option("--a", a, "isotropic coefficient, A = aI")->capture_default_str();
        app->add_option("--n", n, "refractive index")->capture_default_str();
        app->add_option("--eta", eta, "boundary conductivity")->capture_default_str();
    }
};

struct OutputOpts {
    std::string out;
    std::string format = "csv";

    void attach(CLI::App* app) {
        app->add_option("--out", out, "write the result table to this path");
        app->add_option("--format", format, "table format")
            ->check(CLI::IsMember({"csv", "json"}))
            ->capture_default_str();
    }

    void write(const SweepTable& table) const {
        if (out.empty()) return;
        emit(table, format == "json" ? TableFormat::Json : TableFormat::Csv, out);
    }
};

struct FemOpts {
    FemOptions fem;
    std::string weight = "mass";

    void attach(CLI::App* app) {
        app->add_option("--scan-step", fem.scan_step, "f(k) scan grid step")
            ->capture_default_str();
        app->add_option("--bisect-tol", fem.bisect_tol, "bisection bracket width")
            ->capture_default_str();
        app->add_option("--eig-tol", fem.eig_tol, "eigensolve tolerance (bisection)")
            ->capture_default_str();
        app->add_option("--scan-eig-tol", fem.scan_eig_tol, "eigensolve tolerance (scan)")
            ->capture_default_str();
        app->add_option("--weight", weight, "pencil weight")
            ->check(CLI::IsMember({"mass", "h1"}))
            ->capture_default_str();
        app->add_option("--threads", fem.threads, "parallel f evaluations across the scan")
            ->envname("TEV_THREADS")
            ->capture_default_str();
    }

    FemOptions options() const {
        FemOptions o = fem;
        o.weight = weight == "h1" ? PencilWeight::H1 : PencilWeight::Mass;
        return o;
    }
};

struct DiskOpts {
    RootScanOptions disk;

    void attach(CLI::App* app) {
        app->add_option("--grid-step", disk.grid_step, "determinant scan step")
            ->capture_default_str();
        app->add_option("--tol", disk.tol, "bisection bracket width")->capture_default_str();
        app->add_option("--k-min", disk.k_min, "scan floor (default: 0.9 x Faber-Krahn)");
        app->add_flag("--eta-zero-override", disk.allow_eta_zero,
                      "solve the eta = 0 limit problem");
    }
};

DomainSpec domain_from(const std::string& name, int refine) {
    return DomainSpec::parse(name, refine);
}

SweepRow result_row(const MaterialParams& p, const std::string& domain, int refinement,
                    const TevResult& r) {
    SweepRow row;
    row.a = p.is_isotropic() ? p.scalar_a() : p.a_min();
    row.n = p.n;
    row.eta = p.eta;
    row.domain = domain;
    row.refinement = refinement;
    row.k1 = r.k;
    row.residual = r.residual;
    row.backend = r.backend == Backend::Analytic ? "analytic" : "fem";
    return row;
}

void add_disk_command(CLI::App& app, int& rc) {
    auto cmd = app.add_subcommand("disk", "analytic unit-disk solver (roots of d_m)");
    add_config_option(cmd);
    auto dump_path = add_dump_option(cmd);
    auto mat = std::make_shared<MaterialOpts>();
    auto opts = std::make_shared<DiskOpts>();
    auto output = std::make_shared<OutputOpts>();
    auto m = std::make_shared<int>(0);
    auto m_max = std::make_shared<int>(-1);
    auto k_max = std::make_shared<double>(10.0);
    auto curve_csv = std::make_shared<std::string>();
    mat->attach(cmd);
    opts->attach(cmd);
    output->attach(cmd);
    cmd->add_option("--m", *m, "Bessel mode order")->capture_default_str();
    cmd->add_option("--m-max", *m_max, "scan modes 0..m_max and list the spectrum");
    cmd->add_option("--k-max", *k_max, "search ceiling")->capture_default_str();
    cmd->add_option("--curve-csv", *curve_csv, "dump the sampled d_m curve (k, d_m)");

    cmd->callback([=, &rc]() {
        maybe_dump_config(cmd, *dump_path);
        const MaterialParams p = mat->params();
        SweepTable table;
        if (*m_max >= 0) {
            const auto spectrum = tev_spectrum(p, *m_max, *k_max, opts->disk);
            std::printf("spectrum on the unit disk (modes 0..%d, k <= %g): %zu roots\n",
                        *m_max, *k_max, spectrum.size());
            for (const auto& r : spectrum) {
                std::printf("  k = %.6f  (m = %d, residual = %.2e)\n", r.k, r.mode,
                            r.residual);
                table.rows.push_back(result_row(p, "disk", 0, r));
            }
        } else {
            const TevResult r = first_root(*m, p, *k_max, opts->disk);
            std::printf("first root of d_%d: k = %.6f (residual = %.2e, bracket width %.1e)\n",
                        *m, r.k, r.residual, r.bracket_hi - r.bracket_lo);
            table.rows.push_back(result_row(p, "disk", 0, r));
        }
        if (!curve_csv->empty()) {
            RootScanOptions o = opts->disk;
            const double lo = std::isfinite(o.k_min) ? o.k_min : o.grid_step;
            const DetCurve curve = sample_det(*m, p, lo, *k_max, o.grid_step);
            std::ofstream os(*curve_csv, std::ios::binary);
            if (!os) throw IoError("disk: cannot open '" + *curve_csv + "'");
            write_csv(curve, os);
        }
        output->write(table);
        rc = 0;
    });
}

void add_fem_command(CLI::App& app, int& rc) {
    auto cmd = app.add_subcommand("fem", "finite element TEV solver on a meshed domain");
    add_config_option(cmd);
    auto dump_path = add_dump_option(cmd);
    auto mat = std::make_shared<MaterialOpts>();
    auto fem = std::make_shared<FemOpts>();
    auto output = std::make_shared<OutputOpts>();
    auto domain = std::make_shared<std::string>("square");
    auto refine = std::make_shared<int>(3);
    auto k_min = std::make_shared<double>(kNaN);
    auto k_max = std::make_shared<double>(kNaN);
    auto max_count = std::make_shared<int>(1);
    auto scan_csv = std::make_shared<std::string>();
    auto eta_zero = std::make_shared<bool>(false);
    mat->attach(cmd);
    fem->attach(cmd);
    output->attach(cmd);
    cmd->add_option("--domain", *domain, "square | lshape | disk | mesh:PATH")
        ->capture_default_str();
    cmd->add_option("--refine", *refine, "refinement level")->capture_default_str();
    cmd->add_option("--k-min", *k_min, "scan floor (default: 0.9 x Faber-Krahn)");
    cmd->add_option("--k-max", *k_max, "search ceiling (default per domain)");
    cmd->add_option("--max-count", *max_count, "report up to this many roots")
        ->capture_default_str();
    cmd->add_option("--scan-csv", *scan_csv, "dump the sampled (k, f) scan curve");
    cmd->add_flag("--eta-zero-override", *eta_zero, "solve the eta = 0 limit problem");

    cmd->callback([=, &rc]() {
        maybe_dump_config(cmd, *dump_path);
        const MaterialParams p = mat->params();
        const DomainSpec spec = domain_from(*domain, *refine);
        const Mesh mesh = generate(spec);
        std::optional<Regime> regime_ov;
        if (*eta_zero) regime_ov = classify_with_eta_zero_override(p);
        FormSet forms = assemble(mesh, p, regime_ov);
        forms.refinement = *refine;
        const double ceil = std::isfinite(*k_max) ? *k_max : default_k_max(spec);
        FemTevSolver solver(forms, fem->options());
        SweepTable table;
        if (*max_count <= 1 && scan_csv->empty()) {
            const TevResult r = solver.find_first_tev({*k_min, ceil});
            std::printf("first TEV (%s, refine %d, %d interior nodes): k1 = %.6f "
                        "(|f| = %.2e)\n",
                        spec.name().c_str(), *refine, forms.n_interior(), r.k, r.residual);
            table.rows.push_back(result_row(p, spec.name(), *refine, r));
        } else {
            const FemScanOutcome out =
                solver.find_tevs_in_range({*k_min, ceil}, std::max(1, *max_count));
            std::printf("%zu clear roots, %zu near-roots in (%s, refine %d)\n",
                        out.roots.size(), out.near_roots.size(), spec.name().c_str(),
                        *refine);
            for (const auto& r : out.roots) {
                std::printf("  k = %.6f (|f| = %.2e)\n", r.k, r.residual);
                table.rows.push_back(result_row(p, spec.name(), *refine, r));
            }
            for (const auto& r : out.near_roots)
                std::printf("  near-root (no clear crossing) around k = %.4f\n", r.k);
            if (!scan_csv->empty()) {
                std::ofstream os(*scan_csv, std::ios::binary);
                if (!os) throw IoError("fem: cannot open '" + *scan_csv + "'");
                write_csv(out.scan, os);
            }
            if (out.roots.empty())
                throw NoRootInRange("tev_fem: no clear sign change of f in the bracket");
        }
        output->write(table);
        rc = 0;
    });
}

void add_dirichlet_command(CLI::App& app, int& rc) {
    auto cmd = app.add_subcommand("dirichlet",
                                  "Dirichlet eigenvalues of -Laplace or -n^{-1} div(A grad)");
    add_config_option(cmd);
    auto dump_path = add_dump_option(cmd);
    auto mat = std::make_shared<MaterialOpts>();
    auto domain = std::make_shared<std::string>("square");
    auto refine = std::make_shared<int>(4);
    auto count = std::make_shared<int>(1);
    auto weighted = std::make_shared<bool>(false);
    mat->attach(cmd);
    cmd->add_option("--domain", *domain)->capture_default_str();
    cmd->add_option("--refine", *refine)->capture_default_str();
    cmd->add_option("--count", *count, "how many eigenvalues")->capture_default_str();
    cmd->add_flag("--weighted", *weighted, "spectrum of -n^{-1} div(A grad)");

    cmd->callback([=, &rc]() {
        maybe_dump_config(cmd, *dump_path);
        const DomainSpec spec = domain_from(*domain, *refine);
        const Mesh mesh = generate(spec);
        const FormSet forms = assemble(mesh, mat->params());
        const auto lams = dirichlet_eigs(forms, *weighted, *count);
        std::printf("%s Dirichlet eigenvalues (%s, refine %d, %d interior nodes):\n",
                    *weighted ? "weighted" : "Laplace", spec.name().c_str(), *refine,
                    forms.n_interior());
        for (std::size_t j = 0; j < lams.size(); ++j)
            std::printf("  lambda_%zu = %.8f   sqrt = %.6f\n", j + 1, lams[j],
                        std::sqrt(lams[j]));
        rc = 0;
    });
}

void add_sweep_command(CLI::App& app, int& rc) {
    auto cmd = app.add_subcommand("sweep", "monotonicity sweep over one coefficient");
    add_config_option(cmd);
    auto dump_path = add_dump_option(cmd);
    auto mat = std::make_shared<MaterialOpts>();
    auto fem = std::make_shared<FemOpts>();
    auto disk = std::make_shared<DiskOpts>();
    auto output = std::make_shared<OutputOpts>();
    auto domain = std::make_shared<std::string>("square");
    auto refine = std::make_shared<int>(4);
    auto param = std::make_shared<std::string>("a");
    auto values = std::make_shared<std::vector<double>>();
    auto backend = std::make_shared<std::string>("auto");
    auto k_max = std::make_shared<double>(kNaN);
    mat->attach(cmd);
    fem->attach(cmd);
    disk->attach(cmd);
    output->attach(cmd);
    cmd->add_option("--domain", *domain)->capture_default_str();
    cmd->add_option("--refine", *refine)->capture_default_str();
    cmd->add_option("--param", *param, "which coefficient to sweep")
        ->check(CLI::IsMember({"a", "n", "eta"}))
        ->capture_default_str();
    cmd->add_option("--values", *values, "swept values")->delimiter(',')->required();
    cmd->add_option("--backend", *backend)
        ->check(CLI::IsMember({"auto", "analytic", "fem"}))
        ->capture_default_str();
    cmd->add_option("--k-max", *k_max, "search ceiling (default per domain)");

    cmd->callback([=, &rc]() {
        maybe_dump_config(cmd, *dump_path);
        SweepConfig cfg;
        cfg.domain = domain_from(*domain, *refine);
        cfg.base = mat->params();
        cfg.param = *param == "a" ? SweepParam::A
                                  : (*param == "n" ? SweepParam::N : SweepParam::Eta);
        cfg.values = *values;
        cfg.backend = *backend == "analytic"
                          ? BackendChoice::Analytic
                          : (*backend == "fem" ? BackendChoice::Fem : BackendChoice::Auto);
        cfg.k_max = *k_max;
        cfg.fem = fem->options();
        cfg.disk = disk->disk;
        SweepOutcome out = run_monotonicity_sweep(cfg);
        for (const auto& row : out.table.rows) {
            if (std::isfinite(row.k1))
                std::printf("  %s=%g: k1 = %.6f [%s]\n", param->c_str(),
                            *param == "a" ? row.a : (*param == "n" ? row.n : row.eta),
                            row.k1, row.backend.c_str());
            else
                std::printf("  %s row failed: %s\n", param->c_str(), row.backend.c_str());
        }
        std::printf("monotonicity verdict: %s\n", out.verdict.c_str());
        output->write(out.table);
        rc = 0;
    });
}

void add_eoc_command(CLI::App& app, int& rc) {
    auto cmd = app.add_subcommand("eoc", "eta -> 0 / eta -> +-inf limit study with EOC");
    add_config_option(cmd);
    auto dump_path = add_dump_option(cmd);
    auto mat = std::make_shared<MaterialOpts>();
    auto fem = std::make_shared<FemOpts>();
    auto disk = std::make_shared<DiskOpts>();
    auto output = std::make_shared<OutputOpts>();
    auto domain = std::make_shared<std::string>("disk");
    auto refine = std::make_shared<int>(4);
    auto mode = std::make_shared<std::string>();
    auto sign = std::make_shared<int>(1);
    auto p_max = std::make_shared<int>(9);
    auto backend = std::make_shared<std::string>("auto");
    auto k_max = std::make_shared<double>(kNaN);
    auto decimals = std::make_shared<int>(-1);
    auto k_ref = std::make_shared<double>(kNaN);
    mat->attach(cmd);
    fem->attach(cmd);
    disk->attach(cmd);
    output->attach(cmd);
    cmd->add_option("--mode", *mode, "to_zero | to_inf")
        ->check(CLI::IsMember({"to_zero", "to_inf"}))
        ->required();
    cmd->add_option("--sign", *sign, "sign of the eta series")->check(CLI::IsMember({1, -1}))
        ->capture_default_str();
    cmd->add_option("--p-max", *p_max, "eta_p for p = 0..p_max")->capture_default_str();
    cmd->add_option("--domain", *domain)->capture_default_str();
    cmd->add_option("--refine", *refine)->capture_default_str();
    cmd->add_option("--backend", *backend)
        ->check(CLI::IsMember({"auto", "analytic", "fem"}))
        ->capture_default_str();
    cmd->add_option("--k-max", *k_max, "search ceiling (default per domain)");
    cmd->add_option("--table-decimals", *decimals,
                    "round stored k to this many decimals (published-table reproduction)")
        ->capture_default_str();
    cmd->add_option("--k-ref", *k_ref, "supply the reference limit instead of computing it");

    cmd->callback([=, &rc]() {
        maybe_dump_config(cmd, *dump_path);
        EocConfig cfg;
        cfg.domain = domain_from(*domain, *refine);
        cfg.base = mat->params();
        cfg.mode = *mode == "to_zero" ? EtaLimitMode::ToZero : EtaLimitMode::ToInf;
        cfg.sign = *sign;
        cfg.p_max = *p_max;
        cfg.backend = *backend == "analytic"
                          ? BackendChoice::Analytic
                          : (*backend == "fem" ? BackendChoice::Fem : BackendChoice::Auto);
        cfg.k_max = *k_max;
        cfg.table_decimals = *decimals;
        if (std::isfinite(*k_ref)) cfg.k_ref = *k_ref;
        cfg.fem = fem->options();
        cfg.disk = disk->disk;
        const EocSeries s = run_eta_limit_study(cfg);
        std::printf("eta series (%s, %s):\n", s.backend.c_str(), mode->c_str());
        for (std::size_t i = 0; i < s.k.size(); ++i) {
            if (!s.row_errors[i].empty()) {
                std::printf("  eta = %-10g  failed: %s\n", s.eta[i], s.row_errors[i].c_str());
                continue;
            }
            std::printf("  eta = %-10g  k = %.6f", s.eta[i], s.k[i]);
            if (std::isfinite(s.eoc[i])) std::printf("  EOC = %.4f", s.eoc[i]);
            if (std::isfinite(s.eoc_branch[i]) && s.eoc_branch[i] != s.eoc[i])
                std::printf("  (branch EOC = %.4f)", s.eoc_branch[i]);
            std::printf("\n");
        }
        std::printf("reference: k_ref = %.6f (%s)%s\n", s.k_ref, s.ref_kind.c_str(),
                    s.ambiguous ? "  [ambiguous: half-gap rule failed]" : "");
        if (!s.candidates.empty()) {
            int prev = -1;
            for (std::size_t i = 0; i < s.branch.size(); ++i) {
                if (s.branch[i] >= 0 && prev >= 0 && s.branch[i] != prev)
                    std::printf("branch switch at eta = %g: candidate %.6f -> %.6f\n",
                                s.eta[i], s.candidates[prev], s.candidates[s.branch[i]]);
                if (s.branch[i] >= 0) prev = s.branch[i];
            }
        }
        output->write(eoc_to_table(s, cfg));
        rc = 0;
    });
}

void add_mesh_command(CLI::App& app, int& rc) {
    auto cmd = app.add_subcommand("mesh", "generate, inspect, or convert meshes");
    add_config_option(cmd);
    auto dump_path = add_dump_option(cmd);
    auto domain = std::make_shared<std::string>("square");
    auto refine = std::make_shared<int>(0);
    auto in = std::make_shared<std::string>();
    auto out = std::make_shared<std::string>();
    cmd->add_option("--domain", *domain)->capture_default_str();
    cmd->add_option("--refine", *refine)->capture_default_str();
    cmd->add_option("--in", *in, "load this mesh instead of generating");
    cmd->add_option("--out", *out, "save the mesh here");

    cmd->callback([=, &rc]() {
        maybe_dump_config(cmd, *dump_path);
        Mesh mesh;
        if (!in->empty()) {
            mesh = load_mesh(*in);
            for (int r = 0; r < *refine; ++r) mesh = tev::refine(mesh);
        } else {
            mesh = generate(domain_from(*domain, *refine));
        }
        std::printf("vertices %d, triangles %d, edges %d, boundary edges %zu\n",
                    mesh.num_vertices(), mesh.num_triangles(), mesh.num_edges(),
                    mesh.boundary_edges.size());
        std::printf("area = %.12f, boundary length = %.12f, max edge = %.6f\n",
                    mesh.total_area(), mesh.boundary_length(), mesh.max_edge_length());
        std::printf("interior nodes %zu, boundary nodes %zu, Euler V-E+T = %d\n",
                    mesh.interior_nodes.size(), mesh.boundary_nodes.size(),
                    mesh.num_vertices() - mesh.num_edges() + mesh.num_triangles());
        if (!out->empty()) save_mesh(mesh, *out);
        rc = 0;
    });
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"transmission eigenvalues of anisotropic media with conductive boundary"};
    app.require_subcommand(1);
    int rc = 0;
    add_disk_command(app, rc);
    add_fem_command(app, rc);
    add_dirichlet_command(app, rc);
    add_sweep_command(app, rc);
    add_eoc_command(app, rc);
    add_mesh_command(app, rc);

    try {
        std::vector<std::string> tokens;
        for (int i = 1; i < argc; ++i) tokens.emplace_back(argv[i]);
        tokens = expand_config_args(tokens);
        // CLI11 parses reversed vectors of tokens
        std::reverse(tokens.begin(), tokens.end());
        app.parse(tokens);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const ParseError& e) {
        std::cerr << "parse error: " << e.what() << "\n";
        return 2;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << "\n";
        return 2;
    } catch (const RangeError& e) {
        std::cerr << "range error: " << e.what() << "\n";
        return 2;
    } catch (const ShapeError& e) {
        std::cerr << "shape error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "solver error: " << e.what() << "\n";
        return 1;
    }
    return rc;
}

}  // namespace tev::cli
