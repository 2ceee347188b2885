#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "pdmp/errors.hpp"
#include "pdmp/harness.hpp"
#include "pdmp/rates.hpp"
#include "pdmp/rng.hpp"
#include "pdmp/spectral.hpp"

namespace {

using namespace pdmp;

Overrides parse_overrides(const std::vector<std::string>& sets)
{
    Overrides out;
    for (const auto& s : sets) out.push_back(parse_assignment(s));
    return out;
}

int finish(const ExperimentReport& report, const std::string& dir)
{
    write_report(report, dir);
    std::cout << format_table(report);
    std::cout << "wrote " << dir << "/report.csv, report.json, curves/\n";
    if (report.any_chain_errors()) {
        std::cerr << "error: some chains failed (see report status column)\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Piecewise-deterministic Markov process samplers (RHMC, zigzag, BPS) with rate diagnostics.\n"
                 "PDMP_WORKERS overrides the worker count."};
    app.require_subcommand(1);
    app.footer(config_reference());

    // run
    auto* run = app.add_subcommand("run", "Run one experiment file");
    std::string config_path;
    std::vector<std::string> run_sets;
    std::string run_out;
    run->add_option("--config", config_path, "Experiment file (TOML subset)")->required()->check(CLI::ExistingFile);
    run->add_option("--set", run_sets, "Override a key: key=value (repeatable)");
    run->add_option("--out", run_out, "Output directory (default: output_dir from the file)");

    // sweep
    auto* sweep = app.add_subcommand("sweep", "Run a named preset");
    std::string preset;
    std::vector<std::string> sweep_sets;
    std::string sweep_out;
    bool list = false;
    sweep->add_option("--preset", preset, "Preset name");
    sweep->add_option("--set", sweep_sets, "Override a key in every configuration: key=value (repeatable)");
    sweep->add_option("--out", sweep_out, "Output directory (default: pdmp-out/<preset>)");
    sweep->add_flag("--list", list, "List presets and exit");

    // rate
    auto* rate = app.add_subcommand("rate", "Theoretical rate lower bound and optimal parameters");
    std::string rate_process = "rhmc";
    double rate_m = 1.0;
    int rate_d = 1;
    std::string rate_gamma = "auto";
    double hess_upper = kInf, hess_lower_neg = kInf, growth_M = 1.0, c_universal = 1.0;
    bool convex = false, rate_json = false;
    rate->add_option("--process", rate_process, "rhmc | zz | bps")->capture_default_str();
    rate->add_option("--m", rate_m, "Poincare constant m")->capture_default_str();
    rate->add_option("--d", rate_d, "Dimension")->capture_default_str();
    rate->add_option("--gamma", rate_gamma, "Refresh rate or 'auto'")->capture_default_str();
    rate->add_option("--hess-upper", hess_upper, "L with ||Hess U|| <= L (default: unbounded)");
    rate->add_option("--hess-lower-neg", hess_lower_neg, "L with Hess U >= -L I (default: unknown)");
    rate->add_option("--growth-M", growth_M, "Growth constant M")->capture_default_str();
    rate->add_option("--c", c_universal, "Universal constant C")->capture_default_str();
    rate->add_flag("--convex", convex, "U is convex (R = 0)");
    rate->add_flag("--json", rate_json, "Print JSON");

    // spectral
    auto* spectral = app.add_subcommand("spectral", "Decay rate from the truncated Hermite generator (1D Gaussian)");
    std::string sp_process = "rhmc";
    double sp_m = 1.0, sp_gamma = 1.0, sp_horizon = 60.0, sp_dt = 0.0;
    int sp_ntrunc = 32;
    std::string sp_out;
    spectral->add_option("--process", sp_process, "rhmc | zz | bps")->capture_default_str();
    spectral->add_option("--m", sp_m, "Target curvature m")->capture_default_str();
    spectral->add_option("--gamma", sp_gamma, "Refresh rate")->capture_default_str();
    spectral->add_option("--ntrunc", sp_ntrunc, "Hermite degrees per variable")->capture_default_str();
    spectral->add_option("--horizon", sp_horizon, "Propagation horizon")->capture_default_str();
    spectral->add_option("--dt", sp_dt, "RK4 step (default: 0.1 / spectral radius)");
    spectral->add_option("--out", sp_out, "Norm-curve CSV");

    // trajectory
    auto* traj = app.add_subcommand("trajectory", "Dump one chain's segments as CSV");
    std::string tr_config;
    std::vector<std::string> tr_sets;
    std::string tr_out;
    std::uint64_t tr_chain = 0;
    traj->add_option("--config", tr_config, "Experiment file (defaults apply without one)")->check(CLI::ExistingFile);
    traj->add_option("--set", tr_sets, "Override a key: key=value (repeatable)");
    traj->add_option("--chain", tr_chain, "Chain index under master_seed")->capture_default_str();
    traj->add_option("--out", tr_out, "CSV path (default: stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ExperimentConfig cfg = config_from_table(parse_toml_file(config_path));
            for (const auto& [k, v] : parse_overrides(run_sets)) apply_setting(cfg, k, v);
            cfg.validate();
            return finish(run_experiment(cfg), run_out.empty() ? cfg.output_dir : run_out);
        }
        if (*sweep) {
            if (list || preset.empty()) {
                for (const auto& n : preset_names()) std::cout << n << '\n';
                return preset.empty() && !list ? 1 : 0;
            }
            const ExperimentReport report = run_sweep(preset, parse_overrides(sweep_sets));
            const bool failed_check = std::any_of(report.checks.begin(), report.checks.end(),
                                                  [](const SweepCheck& c) { return !c.passed; });
            const int code = finish(report, sweep_out.empty() ? "pdmp-out/" + preset : sweep_out);
            if (failed_check) std::cerr << "note: some preset checks failed\n";
            return code;
        }
        if (*rate) {
            PotentialMeta meta;
            meta.m_poincare = rate_m;
            meta.hess_upper = hess_upper;
            meta.hess_lower_neg = convex ? 0.0 : hess_lower_neg;
            meta.growth_M = growth_M;
            meta.is_convex = convex;
            meta.validate();
            std::optional<double> gamma;
            if (rate_gamma != "auto") gamma = std::stod(rate_gamma);
            const RateReport r = rate_report(parse_process(rate_process), meta, rate_d, gamma, c_universal);
            if (rate_json) {
                auto finite = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
                nlohmann::json j = {{"process", std::string(to_string(r.process))},
                                    {"d", r.d},
                                    {"m", r.m},
                                    {"nu_lower", r.nu_lower},
                                    {"gamma_used", r.gamma_used},
                                    {"gamma_opt", r.gamma_opt},
                                    {"t_opt", finite(r.t_opt)},
                                    {"c_j", finite(r.c_j)},
                                    {"r_used", finite(r.r_used)},
                                    {"c_universal", r.c_universal}};
                std::cout << j.dump(2) << '\n';
            }
            else {
                std::cout << format_report(r);
            }
            return 0;
        }
        if (*spectral) {
            const TruncatedGenerator gen = assemble_generator_1d(parse_process(sp_process), sp_m, sp_gamma, sp_ntrunc);
            const double dt = sp_dt > 0.0 ? sp_dt : max_stable_dt(gen);
            const SpectralDecay dec = decay_rate_spectral(gen, position_mode(gen), sp_horizon, dt);
            std::cout << std::setprecision(6) << "nu_spec " << dec.nu_spec << "\nr2 " << dec.r_squared << "\ndt "
                      << dec.dt << "\nsteps " << dec.steps << "\nmax_norm_increase " << dec.max_norm_increase
                      << "\nmax_energy_excess " << dec.max_energy_excess << "\nmax_energy_gap " << dec.max_energy_gap
                      << '\n';
            if (!sp_out.empty()) {
                std::ofstream out(sp_out);
                if (!out) throw Error("cannot write '" + sp_out + "'");
                out << std::setprecision(17) << "t,norm\n";
                for (const auto& p : dec.norm_curve) out << p.t << ',' << p.norm << '\n';
            }
            return 0;
        }
        if (*traj) {
            ExperimentConfig cfg = tr_config.empty() ? ExperimentConfig{} : config_from_table(parse_toml_file(tr_config));
            for (const auto& [k, v] : parse_overrides(tr_sets)) apply_setting(cfg, k, v);
            cfg.validate();
            const ResolvedRun r = resolve(cfg);
            const Potential pot = cfg.potential.build();
            ChainRng rng = ChainRng::for_chain(cfg.master_seed, tr_chain);
            const InitialCondition init =
                cfg.stationary_start ? InitialCondition::stationary()
                                     : InitialCondition::fixed_position(Vec(static_cast<std::size_t>(pot.dim()), r.init_offset));
            SamplerConfig sc;
            sc.thinning_horizon = cfg.thinning_horizon;
            sc.leapfrog_step = cfg.leapfrog_step;
            const Trajectory path = simulate(cfg.process, pot, r.gamma, r.total_time, init, rng, sc);
            if (tr_out.empty()) {
                write_trajectory_csv(path, std::cout);
            }
            else {
                std::ofstream out(tr_out);
                if (!out) throw Error("cannot write '" + tr_out + "'");
                write_trajectory_csv(path, out);
            }
            return 0;
        }
    }
    catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
