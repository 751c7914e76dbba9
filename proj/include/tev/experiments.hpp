#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "tev/disk_analytic.hpp"
#include "tev/tev_fem.hpp"

namespace tev {

enum class BackendChoice { Auto, Analytic, Fem };
enum class SweepParam { A, N, Eta };
enum class EtaLimitMode { ToZero, ToInf };
enum class TableFormat { Csv, Json };

// One row of a parameter-study table, keyed by (a, n, eta, domain, refinement).
struct SweepRow {
    double a = 0.0, n = 0.0, eta = 0.0;
    std::string domain;
    int refinement = 0;
    double k1 = std::numeric_limits<double>::quiet_NaN();
    std::optional<double> eoc;
    std::string backend;  // "analytic" / "fem" / "error: ..."
    double residual = std::numeric_limits<double>::quiet_NaN();
    double runtime_ms = 0.0;
};

struct SweepTable {
    std::vector<SweepRow> rows;
    void sort_by_key();
};

// CSV: fixed header "a,n,eta,domain,refinement,k1,eoc,backend,residual,runtime_ms".
// JSON: array of row objects with the same field names. Rows are emitted in
// deterministic key order.
void emit(const SweepTable& table, TableFormat format, std::ostream& os);
void emit(const SweepTable& table, TableFormat format, const std::string& path);
SweepTable parse_table_json(std::istream& is);

struct SweepConfig {
    DomainSpec domain;
    MaterialParams base;  // fixed coefficients; the swept one is overwritten per row
    SweepParam param = SweepParam::A;
    std::vector<double> values;
    BackendChoice backend = BackendChoice::Auto;
    double k_max = std::numeric_limits<double>::quiet_NaN();  // per-domain default
    FemOptions fem;
    RootScanOptions disk;
};

struct SweepOutcome {
    SweepTable table;
    std::string verdict;  // ascending / descending / violated
};

// One first-TEV solve per swept value, with a monotonicity verdict over the
// successful rows. Per-row failures are recorded in the row and the sweep
// continues.
SweepOutcome run_monotonicity_sweep(const SweepConfig& config);

struct EocConfig {
    DomainSpec domain;
    MaterialParams base;  // a and n fixed; eta is generated from the series
    EtaLimitMode mode = EtaLimitMode::ToZero;
    int sign = +1;   // sign of the eta series
    int p_max = 9;   // eta_p for p = 0..p_max
    BackendChoice backend = BackendChoice::Auto;
    double k_max = std::numeric_limits<double>::quiet_NaN();
    FemOptions fem;
    RootScanOptions disk;
    // When >= 0, stored k values (and the reference) are rounded to this many
    // decimals before the EOC column is formed. Published tables carry fixed
    // decimal precision, and their EOC columns are reproducible only from the
    // rounded values once |k - k_ref| approaches the last printed digit.
    int table_decimals = -1;
    std::optional<double> k_ref;  // supplied reference wins over computed
    int candidate_count = 6;      // Dirichlet candidates per family (to_inf)
};

struct EocSeries {
    std::vector<double> eta;
    std::vector<double> k;
    std::vector<double> eoc;         // NaN on row 0, after truncation, or on errors
    std::vector<double> eoc_branch;  // same formula against each row's own branch limit
    std::vector<int> branch;         // nearest-candidate index per row (to_inf), else 0
    std::vector<std::string> row_errors;  // "" when the row solved
    std::vector<double> residuals;
    std::vector<double> runtime_ms;
    double k_ref = std::numeric_limits<double>::quiet_NaN();
    std::string ref_kind;  // "eta0", "sqrt(lambda_j)", "sqrt(lambda_j a/n)", "supplied"
    std::vector<double> candidates;  // to_inf candidate values, ascending
    bool ambiguous = false;          // half-gap rule failed for the identified limit
    std::string domain;
    int refinement = 0;
    std::string backend;
};

// The eta -> 0 / eta -> +-inf convergence study with the EOC column and,
// for to_inf, nearest-Dirichlet-candidate limit identification.
EocSeries run_eta_limit_study(const EocConfig& config);

// Rows of the series as a SweepTable (k_eta in the k1 column).
SweepTable eoc_to_table(const EocSeries& series, const EocConfig& config);

// Default search ceiling per domain.
double default_k_max(const DomainSpec& domain);

}  // namespace tev
