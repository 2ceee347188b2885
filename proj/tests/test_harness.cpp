#include "doctest.h"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "pdmp/config.hpp"
#include "pdmp/errors.hpp"
#include "pdmp/harness.hpp"

using namespace pdmp;

namespace {

std::string message_of(auto&& fn)
{
    try {
        fn();
    }
    catch (const std::exception& e) {
        return e.what();
    }
    return {};
}

ExperimentConfig quick_config()
{
    ExperimentConfig cfg;
    cfg.name = "quick";
    cfg.process = Process::ZZ;
    cfg.potential.d = 1;
    cfg.gamma = 1.0;
    cfg.total_time = 8.0;
    cfg.n_chains = 400;
    cfg.master_seed = 17;
    return cfg;
}

}  // namespace

TEST_CASE("toml subset")
{
    const ConfigTable t = parse_toml(R"(
# experiment
name = "demo"   # trailing comment
process = "bps"
gamma = 1.5
spectral = true
fit_window = [2, 9.5]

[potential]
kind = "quadratic"
d = 2
matrix = [[2, 0.5],
          [0.5, 1]]
)");
    CHECK(t.at("name").text == "demo");
    CHECK(t.at("gamma").number == 1.5);
    CHECK(t.at("spectral").flag);
    CHECK(t.at("fit_window").items.size() == 2);
    CHECK(t.at("potential.matrix").items[1].items[0].number == 0.5);

    const ExperimentConfig cfg = config_from_table(t);
    CHECK(cfg.process == Process::BPS);
    CHECK(cfg.potential.kind == PotentialSpec::Kind::Quadratic);
    CHECK(cfg.potential.build().meta().hess_upper == doctest::Approx(1.5 + std::sqrt(0.5)));
    REQUIRE(cfg.fit_window);
    CHECK(cfg.fit_window->t2 == 9.5);
}

TEST_CASE("toml errors carry line numbers")
{
    CHECK(message_of([] { parse_toml("a = 1\nb = \n"); }).find("line 2") != std::string::npos);
    CHECK(message_of([] { parse_toml("a = 1\na = 2\n"); }).find("a") != std::string::npos);
    CHECK_THROWS_AS(parse_toml("a = 1\na = 2\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("[potential\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("x = \"open\n"), ConfigError);
    CHECK_THROWS_AS(parse_toml("v = [1, 2\n"), ConfigError);
}

TEST_CASE("settings are validated per field")
{
    ExperimentConfig cfg;
    CHECK(message_of([&] { apply_setting(cfg, "bogus", parse_override_value("1")); }).find("bogus") != std::string::npos);
    CHECK_THROWS_AS(apply_setting(cfg, "process", parse_override_value("hmc")), ConfigError);
    cfg.n_chains = 0;
    CHECK(message_of([&] { cfg.validate(); }).find("n_chains") != std::string::npos);
    cfg = ExperimentConfig{};
    cfg.total_time = -1.0;
    CHECK(message_of([&] { cfg.validate(); }).find("total_time") != std::string::npos);
    cfg = ExperimentConfig{};
    apply_setting(cfg, "observable", parse_override_value("x3"));
    CHECK(message_of([&] { cfg.validate(); }).find("observable") != std::string::npos);
}

TEST_CASE("command line assignments")
{
    const auto [k, v] = parse_assignment("process=zz");
    CHECK(k == "process");
    CHECK(v.text == "zz");
    const auto [k2, v2] = parse_assignment("gamma = 0.5");
    CHECK(k2 == "gamma");
    CHECK(v2.number == 0.5);
    ExperimentConfig cfg;
    apply_setting(cfg, "gamma", parse_override_value("auto"));
    CHECK_FALSE(cfg.gamma);
    CHECK_THROWS(parse_assignment("novalue"));
}

TEST_CASE("auto values resolve through the rate formulas")
{
    ExperimentConfig cfg;
    cfg.process = Process::RHMC;
    cfg.potential.m = 4.0;
    const ResolvedRun r = resolve(cfg);
    CHECK(r.gamma == doctest::Approx(2.0));
    CHECK(r.nu_theory == doctest::Approx(0.5));
    CHECK(r.init_offset == doctest::Approx(1.0));
    CHECK(r.total_time == doctest::Approx(20.0));
}

TEST_CASE("unknown preset lists the available ones")
{
    const std::string msg = message_of([] { preset_configs("nope"); });
    for (const auto& name : preset_names()) CHECK(msg.find(name) != std::string::npos);
    CHECK_THROWS_AS(run_sweep("nope"), ConfigError);
}

TEST_CASE("presets")
{
    const auto rhmc = preset_configs("rhmc-rate-vs-m");
    REQUIRE(rhmc.size() == 4);
    for (const auto& c : rhmc) {
        CHECK(c.process == Process::RHMC);
        CHECK(resolve(c).gamma == doctest::Approx(std::sqrt(c.potential.m)));
    }
    const auto sweep = preset_configs("gamma-sweep", {{"n_chains", parse_override_value("50")}});
    CHECK(sweep.size() == 9);
    for (const auto& c : sweep) CHECK(c.n_chains == 50);
    CHECK(preset_configs("stationarity").size() == 30);
}

TEST_CASE("one chain over a tiny horizon is insufficient signal")
{
    ExperimentConfig cfg = quick_config();
    cfg.n_chains = 1;
    cfg.total_time = 1e-3;
    const ExperimentReport rep = run_experiment(cfg);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].status == "insufficient_signal");
    CHECK_FALSE(rep.rows[0].nu_hat);
    CHECK(report_csv(rep).find("insufficient_signal") != std::string::npos);
}

TEST_CASE("identical configs give byte-identical csv")
{
    const ExperimentConfig cfg = quick_config();
    const ExperimentReport a = run_experiment(cfg);
    const ExperimentReport b = run_experiment(cfg);
    CHECK(a.rows[0].status == "ok");
    CHECK(report_csv(a) == report_csv(b));

    ExperimentConfig other = cfg;
    other.master_seed = 18;
    CHECK(report_csv(run_experiment(other)) != report_csv(a));
}

TEST_CASE("worker count leaves the report unchanged")
{
    ExperimentConfig cfg = quick_config();
    cfg.workers = 1;
    const std::string one = report_csv(run_experiment(cfg));
    cfg.workers = 3;
    CHECK(report_csv(run_experiment(cfg)) == one);
}

TEST_CASE("PDMP_WORKERS overrides the configured count")
{
    ::unsetenv("PDMP_WORKERS");
    CHECK(resolve_workers(3) == 3);
    ::setenv("PDMP_WORKERS", "2", 1);
    CHECK(resolve_workers(3) == 2);
    ::setenv("PDMP_WORKERS", "zero", 1);
    CHECK_THROWS_AS(resolve_workers(3), ConfigError);
    ::unsetenv("PDMP_WORKERS");
}

TEST_CASE("moments mode reports z-scores")
{
    ExperimentConfig cfg = quick_config();
    cfg.moments = true;
    cfg.stationary_start = true;
    cfg.total_time = 2000.0;
    const ExperimentReport rep = run_experiment(cfg);
    REQUIRE(rep.rows.size() == 1);
    CHECK(rep.rows[0].moments.size() == 4);
    REQUIRE(rep.rows[0].max_abs_z);
    CHECK(*rep.rows[0].max_abs_z < 5.0);
}

TEST_CASE("spectral column for 1D gaussians")
{
    ExperimentConfig cfg = quick_config();
    cfg.process = Process::RHMC;
    cfg.spectral = true;
    cfg.spectral_ntrunc = 8;
    cfg.spectral_horizon = 40.0;
    const ExperimentReport rep = run_experiment(cfg);
    REQUIRE(rep.rows[0].nu_spec);
    CHECK(*rep.rows[0].nu_spec == doctest::Approx(0.5).epsilon(1e-3));
}

TEST_CASE("report files")
{
    const auto dir = std::filesystem::temp_directory_path() / "pdmp-harness-test";
    std::filesystem::remove_all(dir);
    const ExperimentReport rep = run_experiment(quick_config());
    write_report(rep, dir.string());
    CHECK(std::filesystem::exists(dir / "report.csv"));
    CHECK(std::filesystem::exists(dir / "report.json"));
    CHECK(std::filesystem::exists(dir / "curves" / "quick.csv"));
    CHECK(std::filesystem::exists(dir / "curves" / "quick_fit.csv"));

    std::ifstream csv(dir / "report.csv");
    std::string header;
    std::getline(csv, header);
    CHECK(header.rfind("name,process,potential,d,m,L,gamma", 0) == 0);
    std::ostringstream json;
    json << std::ifstream(dir / "report.json").rdbuf();
    CHECK(json.str().find("\"nu_hat\"") != std::string::npos);
    CHECK(json.str().find("\"wallclock_s\"") != std::string::npos);
    std::filesystem::remove_all(dir);

    const std::string table = format_table(rep);
    CHECK(table.find("quick") != std::string::npos);
}

TEST_CASE("log-log slope")
{
    CHECK(log_log_slope({1, 2, 4, 8}, {3, 3 * std::sqrt(2.0), 6, 6 * std::sqrt(2.0)}) == doctest::Approx(0.5));
    CHECK_THROWS(log_log_slope({1}, {1}));
    CHECK_THROWS(log_log_slope({1, 2}, {1, -1}));
}

TEST_CASE("sweep checks")
{
    std::vector<ReportRow> rows(4);
    const double ms[] = {0.0625, 0.25, 1.0, 4.0};
    for (int i = 0; i < 4; ++i) {
        rows[static_cast<std::size_t>(i)].process = Process::RHMC;
        rows[static_cast<std::size_t>(i)].m = ms[i];
        rows[static_cast<std::size_t>(i)].nu_hat = 0.45 * std::sqrt(ms[i]);
    }
    const auto checks = sweep_checks("rhmc-rate-vs-m", rows);
    REQUIRE_FALSE(checks.empty());
    CHECK(checks[0].passed);
    rows[3].nu_hat = 0.45 * 4.0;
    CHECK_FALSE(sweep_checks("rhmc-rate-vs-m", rows)[0].passed);
}
