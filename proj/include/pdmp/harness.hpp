#ifndef PDMP_HARNESS_HPP
#define PDMP_HARNESS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pdmp/config.hpp"
#include "pdmp/diagnostics.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

/// Parameters after "auto" values are resolved.
struct ResolvedRun {
    double gamma = 0.0;
    double total_time = 0.0;
    double grid_dt = 0.0;
    double init_offset = 0.0;
    double nu_theory = 0.0;  // lower bound with c_universal = 1
    double m = 0.0;
    double L = 0.0;
    double envelope_weight = 1.0;
};

ResolvedRun resolve(const ExperimentConfig& cfg);

struct ReportRow {
    std::string name;
    Process process = Process::ZZ;
    std::string potential;
    int d = 1;
    double m = 0.0;
    double L = 0.0;
    double gamma = 0.0;
    double total_time = 0.0;
    std::int64_t n_chains = 0;
    std::uint64_t master_seed = 0;
    std::optional<double> nu_hat;
    std::optional<double> nu_stderr;
    double nu_theory = 0.0;
    std::optional<double> nu_spec;
    EventCounts counts;
    std::int64_t chains_ok = 0;
    std::int64_t chains_failed = 0;
    std::optional<FitWindow> window;
    std::optional<double> r_squared;
    int n_points = 0;
    std::optional<double> max_abs_z;
    std::vector<MomentZ> moments;
    /// "ok", "insufficient_signal", "chain_errors" or "failed".
    std::string status = "ok";
    std::string message;
    /// Reported in JSON only, so the CSV stays reproducible byte for byte.
    double wallclock_s = 0.0;
};

struct CurveSet {
    std::string name;
    ObservableCurve x;
    ObservableCurve v;
    ObservableCurve envelope;
};

struct SweepCheck {
    std::string name;
    bool passed = false;
    /// Informational checks report a quantity without a pass criterion.
    bool informational = false;
    std::string detail;
};

struct ExperimentReport {
    std::string title;
    std::vector<ReportRow> rows;
    std::vector<CurveSet> curves;
    std::vector<SweepCheck> checks;

    bool any_chain_errors() const;
};

/// PDMP_WORKERS when set to a positive integer, else `configured`.
int resolve_workers(int configured);

/// Simulates the ensemble (or one long chain when cfg.moments), fits the
/// decay rate and fills in the theory columns.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

using Overrides = std::vector<std::pair<std::string, ConfigValue>>;

std::vector<std::string> preset_names();
/// Throws ConfigError listing the available presets for an unknown name.
std::vector<ExperimentConfig> preset_configs(const std::string& preset, const Overrides& overrides = {});
ExperimentReport run_sweep(const std::string& preset, const Overrides& overrides = {});

/// The summary checks a preset exists to make.
std::vector<SweepCheck> sweep_checks(const std::string& preset, const std::vector<ReportRow>& rows);

/// report.csv, report.json and curves/<name>.csv plus curves/<name>_fit.csv.
void write_report(const ExperimentReport& report, const std::string& dir);

std::string report_csv(const ExperimentReport& report);
std::string report_json(const ExperimentReport& report);
/// Human-readable table, 6 significant digits.
std::string format_table(const ExperimentReport& report);

/// Least-squares slope of log(y) on log(x).
double log_log_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace pdmp

#endif  // PDMP_HARNESS_HPP
