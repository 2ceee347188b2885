#ifndef PDMP_CONFIG_HPP
#define PDMP_CONFIG_HPP

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "pdmp/diagnostics.hpp"
#include "pdmp/potential.hpp"
#include "pdmp/samplers.hpp"

namespace pdmp {

/// A value from the TOML subset the experiment files use: numbers, strings,
/// booleans and (nested) arrays.
struct ConfigValue {
    enum class Type { Number, String, Bool, Array };
    Type type = Type::Number;
    double number = 0.0;
    std::string text;
    bool flag = false;
    std::vector<ConfigValue> items;

    std::string describe() const;
};

/// Keys are flattened: `d` under `[potential]` becomes "potential.d".
using ConfigTable = std::map<std::string, ConfigValue>;

/// Parses `key = value` lines, `[section]` headers and `#` comments. Throws
/// ConfigError with the line number on malformed input.
ConfigTable parse_toml(std::string_view text);
ConfigTable parse_toml_file(const std::string& path);

/// A bare value as given to `--set`: parsed like TOML, falling back to a
/// plain string (so `process=zz` works unquoted).
ConfigValue parse_override_value(std::string_view text);

struct PotentialSpec {
    enum class Kind { Isotropic, Diagonal, Quadratic, DoubleWell };

    Kind kind = Kind::Isotropic;
    int d = 1;
    double m = 1.0;
    Vec diag;
    std::vector<Vec> matrix;

    Potential build() const;
    /// Largest curvature (Hessian bound); infinite for the double well.
    double L() const;
    /// Curvature along coordinate k, used to balance the x/v envelope.
    double curvature(int k) const;
    /// Stationary standard deviation scale 1/sqrt(m) used for offsets.
    double offset_scale() const;
    std::string describe() const;
};

std::string_view to_string(PotentialSpec::Kind k);

/// One experiment. Empty optionals mean "auto".
struct ExperimentConfig {
    std::string name = "run";
    Process process = Process::ZZ;
    PotentialSpec potential;
    std::optional<double> gamma;            // auto: the rate-optimal gamma
    std::optional<double> total_time;       // auto: 10/nu_theory clamped to [5, 500]
    std::int64_t n_chains = 10000;
    std::optional<double> grid_dt;          // auto: total_time/1000
    int observable = 0;                     // zero-based coordinate of x_k
    std::optional<double> init_offset;      // auto: 2/sqrt(m) per coordinate
    bool stationary_start = false;
    std::optional<FitWindow> fit_window;    // auto: default_fit_window
    double fit_snr = 5.0;
    double fit_start_fraction = 0.25;
    std::uint64_t master_seed = 1;
    std::string output_dir = "pdmp-out";
    int workers = 0;
    double thinning_horizon = 1.0;
    double leapfrog_step = 0.01;
    bool spectral = false;
    int spectral_ntrunc = 32;
    double spectral_horizon = 60.0;
    /// Stationarity mode: one chain of length total_time, moment z-scores
    /// instead of a decay fit.
    bool moments = false;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Applies one `key = value` (the same keys as the file format).
void apply_setting(ExperimentConfig& cfg, const std::string& key, const ConfigValue& value);

ExperimentConfig config_from_table(const ConfigTable& table);

/// `key=value` as given on the command line.
std::pair<std::string, ConfigValue> parse_assignment(std::string_view text);

/// Documentation of every key and its default, for --help.
std::string config_reference();

}  // namespace pdmp

#endif  // PDMP_CONFIG_HPP
