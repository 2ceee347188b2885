#include "pdmp/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "pdmp/ensemble.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/rates.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/spectral.hpp"

namespace pdmp {

ResolvedRun resolve(const ExperimentConfig& cfg)
{
    cfg.validate();
    const Potential pot = cfg.potential.build();
    const PotentialMeta& meta = pot.meta();
    const int d = pot.dim();
    ResolvedRun r;
    r.m = meta.m_poincare;
    r.L = meta.hess_upper;
    r.gamma = cfg.gamma ? *cfg.gamma : optimal_gamma(cfg.process, r.m, meta, d);
    r.nu_theory = rate_lower_bound(cfg.process, r.m, meta, d, r.gamma);
    r.total_time = cfg.total_time ? *cfg.total_time : std::clamp(10.0 / r.nu_theory, 5.0, 500.0);
    r.grid_dt = cfg.grid_dt ? *cfg.grid_dt : r.total_time / 1000.0;
    r.init_offset = cfg.init_offset ? *cfg.init_offset : 2.0 * cfg.potential.offset_scale();
    r.envelope_weight = std::sqrt(cfg.potential.curvature(cfg.observable));
    return r;
}

bool ExperimentReport::any_chain_errors() const
{
    return std::any_of(rows.begin(), rows.end(), [](const ReportRow& r) { return r.chains_failed > 0; });
}

int resolve_workers(int configured)
{
    if (const char* env = std::getenv("PDMP_WORKERS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long w = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || w < 1) throw ConfigError("PDMP_WORKERS: expected a positive integer");
        return static_cast<int>(w);
    }
    return configured;
}

namespace {

ReportRow base_row(const ExperimentConfig& cfg, const ResolvedRun& r)
{
    ReportRow row;
    row.name = cfg.name;
    row.process = cfg.process;
    row.potential = cfg.potential.describe();
    row.d = cfg.potential.d;
    row.m = r.m;
    row.L = r.L;
    row.gamma = r.gamma;
    row.total_time = r.total_time;
    row.n_chains = cfg.moments ? 1 : cfg.n_chains;
    row.master_seed = cfg.master_seed;
    row.nu_theory = r.nu_theory;
    return row;
}

SamplerConfig sampler_config(const ExperimentConfig& cfg)
{
    SamplerConfig s;
    s.thinning_horizon = cfg.thinning_horizon;
    s.leapfrog_step = cfg.leapfrog_step;
    s.record_events = false;
    return s;
}

void run_moments(const ExperimentConfig& cfg, const ResolvedRun& r, const Potential& pot, ReportRow& row)
{
    ChainRng rng = ChainRng::for_chain(cfg.master_seed, 0);
    const InitialCondition init = cfg.stationary_start
                                      ? InitialCondition::stationary()
                                      : InitialCondition::fixed_position(Vec(static_cast<std::size_t>(pot.dim()), r.init_offset));
    try {
        const Trajectory traj = simulate(cfg.process, pot, r.gamma, r.total_time, init, rng, sampler_config(cfg));
        row.counts = traj.counts();
        row.moments = moment_check(traj, pot);
        double worst = 0.0;
        for (const auto& mz : row.moments) worst = std::max(worst, std::abs(mz.z));
        row.max_abs_z = worst;
        row.chains_ok = 1;
    }
    catch (const std::exception& e) {
        row.chains_failed = 1;
        row.status = "failed";
        row.message = e.what();
    }
}

void run_decay(const ExperimentConfig& cfg, const ResolvedRun& r, const Potential& pot, ReportRow& row,
               CurveSet& curves)
{
    const int d = pot.dim();
    EnsembleSpec spec;
    spec.process = cfg.process;
    spec.potential = &pot;
    spec.gamma = r.gamma;
    spec.total_time = r.total_time;
    spec.init = cfg.stationary_start ? InitialCondition::stationary()
                                     : InitialCondition::fixed_position(Vec(static_cast<std::size_t>(d), r.init_offset));
    spec.sampler = sampler_config(cfg);
    spec.grid = uniform_grid(r.total_time, r.grid_dt);
    spec.observables = {Observable::position(d, cfg.observable), Observable::velocity(d, cfg.observable)};
    spec.master_seed = cfg.master_seed;
    spec.n_chains = cfg.n_chains;

    const EnsembleResult ens = run_ensemble(spec, resolve_workers(cfg.workers));
    row.counts = ens.counts;
    row.chains_ok = ens.chains_ok;
    row.chains_failed = ens.chains_failed;
    if (ens.chains_failed > 0) {
        row.status = "chain_errors";
        row.message = std::to_string(ens.chains_failed) + " chain(s) failed; first: " + ens.first_error;
    }
    curves.name = cfg.name;
    curves.x = ens.curves[0];
    curves.v = ens.curves[1];
    curves.envelope = envelope_curve(curves.x, curves.v, 0.0, 0.0, r.envelope_weight);
    if (ens.chains_ok == 0) {
        row.status = "failed";
        return;
    }

    try {
        if (ens.chains_ok < 2) throw InsufficientSignal("standard errors need at least two chains");
        const FitWindow window = cfg.fit_window ? *cfg.fit_window
                                                : default_fit_window(curves.envelope, 0.0, r.nu_theory, cfg.fit_snr,
                                                                     cfg.fit_start_fraction);
        if (!(window.t1 < window.t2)) throw InsufficientSignal("empty fit window");
        const DecayFit fit = fit_decay_rate(curves.envelope, 0.0, window);
        row.nu_hat = fit.nu_hat;
        row.nu_stderr = fit.std_error;
        row.window = fit.window;
        row.r_squared = fit.r_squared;
        row.n_points = fit.points_used;
    }
    catch (const InsufficientSignal& e) {
        if (row.status == "ok") row.status = "insufficient_signal";
        row.message += (row.message.empty() ? "" : "; ") + std::string(e.what());
    }
}

void run_spectral(const ExperimentConfig& cfg, const ResolvedRun& r, ReportRow& row)
{
    const bool gaussian_1d = cfg.potential.d == 1 && cfg.potential.kind != PotentialSpec::Kind::DoubleWell;
    if (!cfg.spectral || !gaussian_1d) return;
    const TruncatedGenerator gen = assemble_generator_1d(cfg.process, r.m, r.gamma, cfg.spectral_ntrunc);
    const SpectralDecay dec = decay_rate_spectral(gen, position_mode(gen), cfg.spectral_horizon, max_stable_dt(gen));
    row.nu_spec = dec.nu_spec;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg)
{
    const auto start = std::chrono::steady_clock::now();
    const ResolvedRun r = resolve(cfg);
    const Potential pot = cfg.potential.build();
    ExperimentReport report;
    report.title = cfg.name;
    ReportRow row = base_row(cfg, r);
    if (cfg.moments) {
        run_moments(cfg, r, pot, row);
    }
    else {
        CurveSet curves;
        run_decay(cfg, r, pot, row, curves);
        report.curves.push_back(std::move(curves));
    }
    run_spectral(cfg, r, row);
    row.wallclock_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report.rows.push_back(std::move(row));
    return report;
}

// ---------------------------------------------------------------------------
// presets

namespace {

std::string num_label(double x)
{
    std::ostringstream out;
    out << x;
    return out.str();
}

ExperimentConfig isotropic(Process p, int d, double m)
{
    ExperimentConfig c;
    c.process = p;
    c.potential.kind = PotentialSpec::Kind::Isotropic;
    c.potential.d = d;
    c.potential.m = m;
    return c;
}

std::vector<ExperimentConfig> build_preset(const std::string& preset)
{
    std::vector<ExperimentConfig> out;
    if (preset == "stationarity") {
        for (Process p : {Process::RHMC, Process::ZZ, Process::BPS}) {
            for (int seed = 1; seed <= 10; ++seed) {
                ExperimentConfig c;
                c.name = "stationarity-" + std::string(to_string(p)) + "-s" + std::to_string(seed);
                c.process = p;
                c.potential.kind = PotentialSpec::Kind::Quadratic;
                c.potential.d = 2;
                c.potential.matrix = {{2.0, 0.5}, {0.5, 1.0}};
                c.gamma = 1.0;
                c.total_time = 5.0e4;
                c.moments = true;
                c.stationary_start = true;
                c.master_seed = static_cast<std::uint64_t>(seed);
                out.push_back(c);
            }
        }
    }
    else if (preset == "rhmc-rate-vs-m") {
        for (double m : {0.0625, 0.25, 1.0, 4.0}) {
            ExperimentConfig c = isotropic(Process::RHMC, 1, m);
            c.name = "rhmc-m" + num_label(m);
            // E[x_t] is linear in x0 for RHMC on a Gaussian: a larger offset
            // only raises the signal above the Monte Carlo noise
            c.init_offset = 8.0 / std::sqrt(m);
            c.spectral = true;
            c.spectral_horizon = 100.0 / std::sqrt(m);
            out.push_back(c);
        }
    }
    else if (preset == "zz-rate-vs-L") {
        for (double L : {1.0, 4.0, 16.0, 64.0}) {
            ExperimentConfig c;
            c.name = "zz-L" + num_label(L);
            c.process = Process::ZZ;
            c.potential.kind = PotentialSpec::Kind::Diagonal;
            c.potential.d = 2;
            c.potential.diag = {1.0, L};
            out.push_back(c);
        }
    }
    else if (preset == "bps-rate-vs-d") {
        for (int d : {1, 2, 4, 8, 16}) {
            ExperimentConfig c = isotropic(Process::BPS, d, 1.0);
            c.name = "bps-d" + std::to_string(d);
            out.push_back(c);
        }
    }
    else if (preset == "gamma-sweep") {
        struct Target {
            Process p;
            int d;
            double offset;
        };
        for (const Target t : {Target{Process::RHMC, 1, 8.0}, Target{Process::ZZ, 1, 2.0}, Target{Process::BPS, 2, 2.0}}) {
            ExperimentConfig base = isotropic(t.p, t.d, 1.0);
            const Potential pot = base.potential.build();
            const double g_opt = optimal_gamma(t.p, 1.0, pot.meta(), t.d);
            for (double factor : {0.1, 1.0, 10.0}) {
                ExperimentConfig c = base;
                c.gamma = g_opt * factor;
                c.name = "gamma-" + std::string(to_string(t.p)) + "-x" + num_label(factor);
                c.init_offset = t.offset;
                c.n_chains = 20000;
                c.spectral = t.d == 1;
                out.push_back(c);
            }
        }
    }
    else if (preset == "zz-product") {
        const PotentialMeta meta = double_well_meta();
        // dimension-free refresh rate: the product's curvature bounds are
        // per coordinate, so only d-independent terms enter gamma
        const double gamma = std::sqrt(meta.m_poincare) + std::sqrt(meta.hess_lower_neg);
        for (int d : {1, 2, 4, 8}) {
            ExperimentConfig c;
            c.name = "zz-product-d" + std::to_string(d);
            c.process = Process::ZZ;
            c.potential.kind = PotentialSpec::Kind::DoubleWell;
            c.potential.d = d;
            c.gamma = gamma;
            c.total_time = 60.0;
            out.push_back(c);
        }
    }
    else {
        std::string names;
        for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
        throw ConfigError("unknown preset '" + preset + "'; available presets: " + names);
    }
    return out;
}

}  // namespace

std::vector<std::string> preset_names()
{
    return {"stationarity", "rhmc-rate-vs-m", "zz-rate-vs-L", "bps-rate-vs-d", "gamma-sweep", "zz-product"};
}

std::vector<ExperimentConfig> preset_configs(const std::string& preset, const Overrides& overrides)
{
    std::vector<ExperimentConfig> configs = build_preset(preset);
    for (auto& c : configs) {
        for (const auto& [key, value] : overrides) apply_setting(c, key, value);
        c.validate();
    }
    return configs;
}

ExperimentReport run_sweep(const std::string& preset, const Overrides& overrides)
{
    ExperimentReport report;
    report.title = preset;
    for (const auto& cfg : preset_configs(preset, overrides)) {
        ExperimentReport one = run_experiment(cfg);
        for (auto& r : one.rows) report.rows.push_back(std::move(r));
        for (auto& c : one.curves) report.curves.push_back(std::move(c));
    }
    report.checks = sweep_checks(preset, report.rows);
    return report;
}

double log_log_slope(const std::vector<double>& x, const std::vector<double>& y)
{
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("log_log_slope: needs two or more points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = static_cast<double>(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("log_log_slope: needs positive values");
        const double lx = std::log(x[i]), ly = std::log(y[i]);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (sxy - sx * sy / n) / (sxx - sx * sx / n);
}

namespace {

std::string fmt6(double x)
{
    std::ostringstream out;
    out << std::setprecision(6) << x;
    return out.str();
}

}  // namespace

std::vector<SweepCheck> sweep_checks(const std::string& preset, const std::vector<ReportRow>& rows)
{
    std::vector<SweepCheck> checks;
    auto fitted = [&](auto pred) {
        std::vector<const ReportRow*> out;
        for (const auto& r : rows)
            if (pred(r)) out.push_back(&r);
        return out;
    };
    auto all_fitted = [](const std::vector<const ReportRow*>& rs) {
        return !rs.empty() && std::all_of(rs.begin(), rs.end(), [](const ReportRow* r) { return r->nu_hat.has_value(); });
    };

    if (preset == "stationarity") {
        for (Process p : {Process::RHMC, Process::ZZ, Process::BPS}) {
            const auto rs = fitted([p](const ReportRow& r) { return r.process == p; });
            int pass = 0;
            for (const auto* r : rs)
                if (r->max_abs_z && *r->max_abs_z < 3.0) ++pass;
            SweepCheck c;
            c.name = std::string(to_string(p)) + " moments |z| < 3";
            c.passed = !rs.empty() && pass * 10 >= static_cast<int>(rs.size()) * 9;
            c.detail = std::to_string(pass) + "/" + std::to_string(rs.size()) + " seeds";
            checks.push_back(c);
        }
    }
    else if (preset == "rhmc-rate-vs-m" || preset == "zz-rate-vs-L" || preset == "bps-rate-vs-d") {
        const auto rs = fitted([](const ReportRow&) { return true; });
        SweepCheck c;
        if (!all_fitted(rs)) {
            c.name = preset + " slope";
            c.detail = "some rows have no fitted rate";
            checks.push_back(c);
            return checks;
        }
        std::vector<double> x, y;
        for (const auto* r : rs) {
            x.push_back(preset == "rhmc-rate-vs-m" ? r->m : preset == "zz-rate-vs-L" ? r->L : r->d);
            y.push_back(*r->nu_hat);
        }
        const double slope = log_log_slope(x, y);
        if (preset == "rhmc-rate-vs-m") {
            c.name = "log-log slope of nu_hat on m in [0.4, 0.6]";
            c.passed = slope >= 0.4 && slope <= 0.6;
        }
        else if (preset == "zz-rate-vs-L") {
            c.name = "log-log slope of nu_hat on L (bound: -0.5)";
            c.informational = true;
            c.passed = true;
        }
        else {
            c.name = "log-log slope of nu_hat on d (bound: -0.5)";
            c.informational = true;
            c.passed = true;
        }
        c.detail = "slope " + fmt6(slope);
        checks.push_back(c);
        if (preset == "bps-rate-vs-d") {
            // lower-bound dominance with c calibrated on d = 1
            const double c0 = *rs.front()->nu_hat / rs.front()->nu_theory;
            SweepCheck dom;
            dom.name = "nu_hat >= c * bound(d), c fitted at d=1";
            dom.passed = true;
            std::string worst;
            for (const auto* r : rs) {
                const double ratio = *r->nu_hat / (c0 * r->nu_theory);
                if (ratio < 1.0) dom.passed = false;
                worst += (worst.empty() ? "" : " ") + std::string("d=") + std::to_string(r->d) + ":" + fmt6(ratio);
            }
            dom.detail = "nu_hat/(c bound) " + worst;
            checks.push_back(dom);
        }
    }
    else if (preset == "gamma-sweep") {
        for (Process p : {Process::RHMC, Process::ZZ, Process::BPS}) {
            auto rs = fitted([p](const ReportRow& r) { return r.process == p; });
            SweepCheck c;
            c.name = std::string(to_string(p)) + " nu_hat(gamma*) beats gamma*/10 and 10 gamma*";
            if (rs.size() != 3 || !all_fitted(rs)) {
                c.detail = "missing fitted rows";
                checks.push_back(c);
                continue;
            }
            std::sort(rs.begin(), rs.end(), [](const ReportRow* a, const ReportRow* b) { return a->gamma < b->gamma; });
            const double lo = *rs[0]->nu_hat, mid = *rs[1]->nu_hat, hi = *rs[2]->nu_hat;
            c.passed = mid > lo && mid > hi;
            c.detail = fmt6(lo) + " < " + fmt6(mid) + " > " + fmt6(hi);
            checks.push_back(c);
        }
    }
    else if (preset == "zz-product") {
        const auto rs = fitted([](const ReportRow&) { return true; });
        SweepCheck c;
        c.name = "max/min nu_hat over d < 1.5";
        if (!all_fitted(rs)) {
            c.detail = "some rows have no fitted rate";
        }
        else {
            double lo = kInf, hi = 0.0;
            for (const auto* r : rs) {
                lo = std::min(lo, *r->nu_hat);
                hi = std::max(hi, *r->nu_hat);
            }
            c.passed = hi / lo < 1.5;
            c.detail = "ratio " + fmt6(hi / lo);
        }
        checks.push_back(c);
    }
    return checks;
}

// ---------------------------------------------------------------------------
// output

namespace {

std::string full(double x)
{
    std::ostringstream out;
    out << std::setprecision(17) << x;
    return out.str();
}

std::string opt_full(const std::optional<double>& x) { return x ? full(*x) : ""; }

void write_file(const std::filesystem::path& path, const std::string& content)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write '" + path.string() + "'");
    out << content;
}

}  // namespace

std::string report_csv(const ExperimentReport& report)
{
    std::ostringstream out;
    out << "name,process,potential,d,m,L,gamma,total_time,n_chains,master_seed,nu_hat,nu_stderr,nu_theory,nu_spec,"
           "refresh,bounce,marker,chains_ok,chains_failed,fit_t1,fit_t2,r2,n_points,max_abs_z,status\n";
    for (const auto& r : report.rows) {
        out << r.name << ',' << to_string(r.process) << ',' << r.potential << ',' << r.d << ',' << full(r.m) << ','
            << full(r.L) << ',' << full(r.gamma) << ',' << full(r.total_time) << ',' << r.n_chains << ','
            << r.master_seed << ',' << opt_full(r.nu_hat) << ',' << opt_full(r.nu_stderr) << ',' << full(r.nu_theory)
            << ',' << opt_full(r.nu_spec) << ',' << r.counts.refresh << ',' << r.counts.bounce << ','
            << r.counts.marker << ',' << r.chains_ok << ',' << r.chains_failed << ','
            << (r.window ? full(r.window->t1) : "") << ',' << (r.window ? full(r.window->t2) : "") << ','
            << opt_full(r.r_squared) << ',' << r.n_points << ',' << opt_full(r.max_abs_z) << ',' << r.status << '\n';
    }
    return out.str();
}

std::string report_json(const ExperimentReport& report)
{
    using nlohmann::json;
    auto opt = [](const std::optional<double>& x) { return x ? json(*x) : json(nullptr); };
    auto finite = [](double x) { return std::isfinite(x) ? json(x) : json(nullptr); };
    json rows = json::array();
    for (const auto& r : report.rows) {
        json moments = json::array();
        for (const auto& mz : r.moments)
            moments.push_back({{"moment", mz.name}, {"estimate", mz.estimate}, {"truth", mz.truth},
                               {"stderr", mz.std_error}, {"z", finite(mz.z)}});
        rows.push_back({{"name", r.name},
                        {"process", std::string(to_string(r.process))},
                        {"potential", r.potential},
                        {"d", r.d},
                        {"m", r.m},
                        {"L", finite(r.L)},
                        {"gamma", r.gamma},
                        {"total_time", r.total_time},
                        {"n_chains", r.n_chains},
                        {"master_seed", r.master_seed},
                        {"nu_hat", opt(r.nu_hat)},
                        {"nu_stderr", opt(r.nu_stderr)},
                        {"nu_theory", r.nu_theory},
                        {"nu_spec", opt(r.nu_spec)},
                        {"events", {{"refresh", r.counts.refresh}, {"bounce", r.counts.bounce}, {"marker", r.counts.marker}}},
                        {"chains_ok", r.chains_ok},
                        {"chains_failed", r.chains_failed},
                        {"fit_window", r.window ? json::array({r.window->t1, r.window->t2}) : json(nullptr)},
                        {"r2", opt(r.r_squared)},
                        {"n_points", r.n_points},
                        {"max_abs_z", opt(r.max_abs_z)},
                        {"moments", moments},
                        {"status", r.status},
                        {"message", r.message},
                        {"wallclock_s", r.wallclock_s}});
    }
    json checks = json::array();
    for (const auto& c : report.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"informational", c.informational}, {"detail", c.detail}});
    json doc = {{"title", report.title}, {"rows", rows}, {"checks", checks}};
    return doc.dump(2) + "\n";
}

void write_report(const ExperimentReport& report, const std::string& dir)
{
    namespace fs = std::filesystem;
    const fs::path root(dir);
    fs::create_directories(root / "curves");
    write_file(root / "report.csv", report_csv(report));
    write_file(root / "report.json", report_json(report));
    for (const auto& c : report.curves) {
        std::ostringstream out;
        out << "t,mean_x,stderr_x,mean_v,stderr_v,envelope,envelope_stderr\n";
        for (std::size_t g = 0; g < c.x.grid.size(); ++g) {
            out << full(c.x.grid[g]) << ',' << full(c.x.mean[g]) << ',' << full(c.x.std_error[g]) << ','
                << full(c.v.mean[g]) << ',' << full(c.v.std_error[g]) << ',' << full(c.envelope.mean[g]) << ','
                << full(c.envelope.std_error[g]) << '\n';
        }
        write_file(root / "curves" / (c.name + ".csv"), out.str());
    }
    for (const auto& r : report.rows) {
        if (r.moments.empty() && !r.nu_hat && r.status == "ok") continue;
        std::ostringstream out;
        out << "nu_hat,stderr,t1,t2,r2,n_points\n";
        out << opt_full(r.nu_hat) << ',' << opt_full(r.nu_stderr) << ',' << (r.window ? full(r.window->t1) : "") << ','
            << (r.window ? full(r.window->t2) : "") << ',' << opt_full(r.r_squared) << ',' << r.n_points << '\n';
        if (!r.moments.empty()) {
            out << "\nmoment,estimate,truth,stderr,z\n";
            for (const auto& mz : r.moments)
                out << mz.name << ',' << full(mz.estimate) << ',' << full(mz.truth) << ',' << full(mz.std_error) << ','
                    << full(mz.z) << '\n';
        }
        write_file(root / "curves" / (r.name + "_fit.csv"), out.str());
    }
}

std::string format_table(const ExperimentReport& report)
{
    std::ostringstream out;
    // padded columns that always keep at least one space between cells
    auto col = [&out](const std::string& text, std::size_t width) {
        out << text << std::string(text.size() < width ? width - text.size() : 1, ' ');
    };
    auto cell = [](const std::optional<double>& x) { return x ? fmt6(*x) : std::string("-"); };
    col("name", 26), col("proc", 6), col("d", 4), col("m", 10), col("gamma", 10), col("nu_hat", 11);
    col("stderr", 12), col("nu_theory", 11), col("nu_spec", 11), col("max|z|", 10);
    out << "status\n";
    for (const auto& r : report.rows) {
        col(r.name, 26), col(std::string(to_string(r.process)), 6), col(std::to_string(r.d), 4);
        col(fmt6(r.m), 10), col(fmt6(r.gamma), 10), col(cell(r.nu_hat), 11), col(cell(r.nu_stderr), 12);
        col(fmt6(r.nu_theory), 11), col(cell(r.nu_spec), 11), col(cell(r.max_abs_z), 10);
        out << r.status;
        if (!r.message.empty()) out << " (" << r.message << ")";
        out << '\n';
    }
    for (const auto& c : report.checks)
        out << (c.informational ? "[info] " : c.passed ? "[pass] " : "[FAIL] ") << c.name << ": " << c.detail << '\n';
    return out.str();
}

}  // namespace pdmp
