#include "pdmp/config.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pdmp/errors.hpp"

namespace pdmp {

std::string ConfigValue::describe() const
{
    std::ostringstream out;
    switch (type) {
        case Type::Number: out << number; break;
        case Type::String: out << '"' << text << '"'; break;
        case Type::Bool: out << (flag ? "true" : "false"); break;
        case Type::Array:
            out << '[';
            for (std::size_t i = 0; i < items.size(); ++i) out << (i ? ", " : "") << items[i].describe();
            out << ']';
            break;
    }
    return out.str();
}

namespace {

class ValueParser {
public:
    ValueParser(std::string_view text, int line) : s_(text), line_(line) {}

    ConfigValue parse_complete()
    {
        ConfigValue v = parse_value();
        skip_space();
        if (pos_ != s_.size()) fail("trailing characters after value");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& what) const
    {
        throw ConfigError("line " + std::to_string(line_) + ": " + what);
    }

    void skip_space()
    {
        while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
            ++pos_;
    }

    ConfigValue parse_value()
    {
        skip_space();
        if (pos_ >= s_.size()) fail("missing value");
        const char c = s_[pos_];
        if (c == '"') return parse_string();
        if (c == '[') return parse_array();
        if (s_.substr(pos_, 4) == "true") {
            pos_ += 4;
            ConfigValue v;
            v.type = ConfigValue::Type::Bool;
            v.flag = true;
            return v;
        }
        if (s_.substr(pos_, 5) == "false") {
            pos_ += 5;
            ConfigValue v;
            v.type = ConfigValue::Type::Bool;
            return v;
        }
        return parse_number();
    }

    ConfigValue parse_string()
    {
        ++pos_;
        ConfigValue v;
        v.type = ConfigValue::Type::String;
        while (pos_ < s_.size() && s_[pos_] != '"') {
            if (s_[pos_] == '\\' && pos_ + 1 < s_.size()) ++pos_;
            v.text.push_back(s_[pos_++]);
        }
        if (pos_ >= s_.size()) fail("unterminated string");
        ++pos_;
        return v;
    }

    ConfigValue parse_array()
    {
        ++pos_;
        ConfigValue v;
        v.type = ConfigValue::Type::Array;
        skip_space();
        if (pos_ < s_.size() && s_[pos_] == ']') {
            ++pos_;
            return v;
        }
        while (true) {
            v.items.push_back(parse_value());
            skip_space();
            if (pos_ >= s_.size()) fail("unterminated array");
            if (s_[pos_] == ',') {
                ++pos_;
                skip_space();
                if (pos_ < s_.size() && s_[pos_] == ']') {
                    ++pos_;
                    return v;
                }
                continue;
            }
            if (s_[pos_] == ']') {
                ++pos_;
                return v;
            }
            fail("expected ',' or ']' in array");
        }
    }

    ConfigValue parse_number()
    {
        std::size_t end = pos_;
        while (end < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[end])) || s_[end] == '.' ||
                                   s_[end] == '-' || s_[end] == '+' || s_[end] == '_'))
            ++end;
        std::string token;
        for (std::size_t i = pos_; i < end; ++i)
            if (s_[i] != '_') token.push_back(s_[i]);
        if (token.empty()) fail("unexpected character '" + std::string(1, s_[pos_]) + "'");
        if (token == "inf" || token == "+inf" || token == "-inf") {
            pos_ = end;
            ConfigValue v;
            v.number = token[0] == '-' ? -kInf : kInf;
            return v;
        }
        double value = 0.0;
        const auto res = std::from_chars(token.data(), token.data() + token.size(), value);
        if (res.ec != std::errc{} || res.ptr != token.data() + token.size()) fail("not a number: '" + token + "'");
        pos_ = end;
        ConfigValue v;
        v.number = value;
        return v;
    }

    std::string_view s_;
    std::size_t pos_ = 0;
    int line_;
};

std::string trim(std::string_view s)
{
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

/// Drops a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line)
{
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (line[i] == '#' && !in_string) return line.substr(0, i);
    }
    return line;
}

int bracket_balance(const std::string& s)
{
    int depth = 0;
    bool in_string = false;
    for (char c : s) {
        if (c == '"') in_string = !in_string;
        if (in_string) continue;
        if (c == '[') ++depth;
        if (c == ']') --depth;
    }
    return depth;
}

[[noreturn]] void field_error(const std::string& key, const std::string& what)
{
    throw ConfigError(key + ": " + what);
}

double as_number(const std::string& key, const ConfigValue& v)
{
    if (v.type != ConfigValue::Type::Number) field_error(key, "expected a number, got " + v.describe());
    return v.number;
}

std::int64_t as_integer(const std::string& key, const ConfigValue& v)
{
    const double x = as_number(key, v);
    if (std::floor(x) != x || std::abs(x) > 9.0e15) field_error(key, "expected an integer, got " + v.describe());
    return static_cast<std::int64_t>(x);
}

std::string as_string(const std::string& key, const ConfigValue& v)
{
    if (v.type != ConfigValue::Type::String) field_error(key, "expected a string, got " + v.describe());
    return v.text;
}

bool as_bool(const std::string& key, const ConfigValue& v)
{
    if (v.type != ConfigValue::Type::Bool) field_error(key, "expected true or false, got " + v.describe());
    return v.flag;
}

bool is_auto(const ConfigValue& v) { return v.type == ConfigValue::Type::String && v.text == "auto"; }

std::optional<double> number_or_auto(const std::string& key, const ConfigValue& v)
{
    if (is_auto(v)) return std::nullopt;
    if (v.type != ConfigValue::Type::Number) field_error(key, "expected a number or \"auto\", got " + v.describe());
    return v.number;
}

Vec as_vector(const std::string& key, const ConfigValue& v)
{
    if (v.type != ConfigValue::Type::Array) field_error(key, "expected an array of numbers, got " + v.describe());
    Vec out;
    for (const auto& item : v.items) out.push_back(as_number(key, item));
    return out;
}

}  // namespace

ConfigTable parse_toml(std::string_view text)
{
    ConfigTable table;
    std::string section;
    std::istringstream in{std::string(text)};
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const int start_line = line_no;
        std::string line = trim(strip_comment(raw));
        if (line.empty()) continue;
        if (line.front() == '[' && line.find('=') == std::string::npos) {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            section = trim(std::string_view(line).substr(1, line.size() - 2));
            if (section.empty()) throw ConfigError("line " + std::to_string(line_no) + ": empty section name");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(std::string_view(line).substr(0, eq));
        std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) throw ConfigError("line " + std::to_string(line_no) + ": missing key");
        // multi-line arrays
        while (bracket_balance(value) > 0 && std::getline(in, raw)) {
            ++line_no;
            value += " " + trim(strip_comment(raw));
        }
        const std::string full = section.empty() ? key : section + "." + key;
        if (table.count(full)) throw ConfigError("line " + std::to_string(start_line) + ": duplicate key '" + full + "'");
        table[full] = ValueParser(value, start_line).parse_complete();
    }
    return table;
}

ConfigTable parse_toml_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_toml(buf.str());
}

ConfigValue parse_override_value(std::string_view text)
{
    try {
        return ValueParser(text, 0).parse_complete();
    }
    catch (const ConfigError&) {
        ConfigValue v;
        v.type = ConfigValue::Type::String;
        v.text = trim(text);
        return v;
    }
}

std::pair<std::string, ConfigValue> parse_assignment(std::string_view text)
{
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(text) + "'");
    std::string key = trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("missing key in '" + std::string(text) + "'");
    return {key, parse_override_value(text.substr(eq + 1))};
}

std::string_view to_string(PotentialSpec::Kind k)
{
    switch (k) {
        case PotentialSpec::Kind::Isotropic: return "isotropic";
        case PotentialSpec::Kind::Diagonal: return "diagonal";
        case PotentialSpec::Kind::Quadratic: return "quadratic";
        case PotentialSpec::Kind::DoubleWell: return "double_well";
    }
    return "?";
}

Potential PotentialSpec::build() const
{
    switch (kind) {
        case Kind::Isotropic: return Potential::isotropic_gaussian(d, m);
        case Kind::Diagonal: return Potential::diagonal_gaussian(diag);
        case Kind::Quadratic: {
            Vec flat;
            for (const auto& row : matrix) {
                if (row.size() != matrix.size()) throw ConfigError("potential.matrix: must be square");
                flat.insert(flat.end(), row.begin(), row.end());
            }
            return Potential::quadratic(DenseMatrix::from_rows(matrix.size(), matrix.size(), flat));
        }
        case Kind::DoubleWell: return Potential::double_well_product(d);
    }
    throw ConfigError("potential.kind: unknown kind");
}

double PotentialSpec::L() const
{
    return build().meta().hess_upper;
}

double PotentialSpec::curvature(int k) const
{
    switch (kind) {
        case Kind::Isotropic: return m;
        case Kind::Diagonal: return diag.at(static_cast<std::size_t>(k));
        case Kind::Quadratic: return matrix.at(static_cast<std::size_t>(k)).at(static_cast<std::size_t>(k));
        case Kind::DoubleWell: return double_well_meta().m_poincare;
    }
    return 1.0;
}

double PotentialSpec::offset_scale() const
{
    return 1.0 / std::sqrt(build().meta().m_poincare);
}

std::string PotentialSpec::describe() const
{
    std::ostringstream out;
    out << to_string(kind) << " d=" << d;
    if (kind == Kind::Isotropic) out << " m=" << m;
    if (kind == Kind::Diagonal) {
        out << " diag=[";
        for (std::size_t i = 0; i < diag.size(); ++i) out << (i ? "," : "") << diag[i];
        out << "]";
    }
    return out.str();
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const ConfigValue& v)
{
    if (key == "name") cfg.name = as_string(key, v);
    else if (key == "process") {
        try {
            cfg.process = parse_process(as_string(key, v));
        }
        catch (const ConfigError&) {
            throw;
        }
        catch (const std::exception& e) {
            field_error(key, e.what());
        }
    }
    else if (key == "gamma") cfg.gamma = number_or_auto(key, v);
    else if (key == "total_time") cfg.total_time = number_or_auto(key, v);
    else if (key == "n_chains") cfg.n_chains = as_integer(key, v);
    else if (key == "grid_dt") cfg.grid_dt = number_or_auto(key, v);
    else if (key == "observable") {
        const std::string s = as_string(key, v);
        int k = 0;
        const auto res = std::from_chars(s.data() + std::min<std::size_t>(1, s.size()), s.data() + s.size(), k);
        if (s.size() < 2 || s[0] != 'x' || res.ec != std::errc{} || res.ptr != s.data() + s.size() || k < 1)
            field_error(key, "expected \"x<k>\" with k >= 1, got " + v.describe());
        cfg.observable = k - 1;
    }
    else if (key == "init_offset") cfg.init_offset = number_or_auto(key, v);
    else if (key == "start") {
        const std::string s = as_string(key, v);
        if (s == "fixed") cfg.stationary_start = false;
        else if (s == "stationary") cfg.stationary_start = true;
        else field_error(key, "expected \"fixed\" or \"stationary\", got " + v.describe());
    }
    else if (key == "fit_window") {
        if (is_auto(v)) cfg.fit_window.reset();
        else {
            const Vec w = as_vector(key, v);
            if (w.size() != 2) field_error(key, "expected \"auto\" or [t1, t2]");
            cfg.fit_window = FitWindow{w[0], w[1]};
        }
    }
    else if (key == "fit_snr") cfg.fit_snr = as_number(key, v);
    else if (key == "fit_start_fraction") cfg.fit_start_fraction = as_number(key, v);
    else if (key == "master_seed") {
        const double x = as_number(key, v);
        if (x < 0 || std::floor(x) != x || x > 9.0e15) field_error(key, "expected a nonnegative integer");
        cfg.master_seed = static_cast<std::uint64_t>(x);
    }
    else if (key == "output_dir") cfg.output_dir = as_string(key, v);
    else if (key == "workers") cfg.workers = static_cast<int>(as_integer(key, v));
    else if (key == "thinning_horizon") cfg.thinning_horizon = as_number(key, v);
    else if (key == "leapfrog_step") cfg.leapfrog_step = as_number(key, v);
    else if (key == "spectral") cfg.spectral = as_bool(key, v);
    else if (key == "spectral_ntrunc") cfg.spectral_ntrunc = static_cast<int>(as_integer(key, v));
    else if (key == "spectral_horizon") cfg.spectral_horizon = as_number(key, v);
    else if (key == "moments") cfg.moments = as_bool(key, v);
    else if (key == "potential.kind") {
        const std::string s = as_string(key, v);
        if (s == "isotropic") cfg.potential.kind = PotentialSpec::Kind::Isotropic;
        else if (s == "diagonal") cfg.potential.kind = PotentialSpec::Kind::Diagonal;
        else if (s == "quadratic") cfg.potential.kind = PotentialSpec::Kind::Quadratic;
        else if (s == "double_well") cfg.potential.kind = PotentialSpec::Kind::DoubleWell;
        else field_error(key, "expected isotropic, diagonal, quadratic or double_well, got " + v.describe());
    }
    else if (key == "potential.d") cfg.potential.d = static_cast<int>(as_integer(key, v));
    else if (key == "potential.m") cfg.potential.m = as_number(key, v);
    else if (key == "potential.diag") {
        cfg.potential.diag = as_vector(key, v);
        cfg.potential.d = static_cast<int>(cfg.potential.diag.size());
    }
    else if (key == "potential.matrix") {
        if (v.type != ConfigValue::Type::Array) field_error(key, "expected an array of rows");
        cfg.potential.matrix.clear();
        for (const auto& row : v.items) cfg.potential.matrix.push_back(as_vector(key, row));
        cfg.potential.d = static_cast<int>(cfg.potential.matrix.size());
    }
    else throw ConfigError("unknown key '" + key + "'");
}

ExperimentConfig config_from_table(const ConfigTable& table)
{
    ExperimentConfig cfg;
    // kind and dimensions first so later keys can refer to them
    for (const char* early : {"potential.kind", "potential.d"})
        if (auto it = table.find(early); it != table.end()) apply_setting(cfg, it->first, it->second);
    for (const auto& [key, value] : table) {
        if (key == "potential.kind" || key == "potential.d") continue;
        apply_setting(cfg, key, value);
    }
    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const
{
    if (n_chains < 1) throw ConfigError("n_chains: must be at least 1");
    if (total_time && !(*total_time > 0.0)) throw ConfigError("total_time: must be positive");
    if (gamma && !(*gamma > 0.0)) throw ConfigError("gamma: must be positive");
    if (grid_dt && !(*grid_dt > 0.0)) throw ConfigError("grid_dt: must be positive");
    if (fit_window && !(fit_window->t1 < fit_window->t2)) throw ConfigError("fit_window: needs t1 < t2");
    if (!(fit_snr > 0.0)) throw ConfigError("fit_snr: must be positive");
    if (!(fit_start_fraction > 0.0 && fit_start_fraction < 1.0)) throw ConfigError("fit_start_fraction: must lie in (0, 1)");
    if (!(thinning_horizon > 0.0)) throw ConfigError("thinning_horizon: must be positive");
    if (!(leapfrog_step > 0.0)) throw ConfigError("leapfrog_step: must be positive");
    if (workers < 0) throw ConfigError("workers: must be nonnegative");
    if (spectral_ntrunc < 2) throw ConfigError("spectral_ntrunc: must be at least 2");
    if (!(spectral_horizon > 0.0)) throw ConfigError("spectral_horizon: must be positive");
    if (potential.d < 1) throw ConfigError("potential.d: must be at least 1");
    if (observable < 0 || observable >= potential.d)
        throw ConfigError("observable: x" + std::to_string(observable + 1) + " outside dimension " +
                          std::to_string(potential.d));
    if (potential.kind == PotentialSpec::Kind::Isotropic && !(potential.m > 0.0))
        throw ConfigError("potential.m: must be positive");
    if (potential.kind == PotentialSpec::Kind::Diagonal) {
        if (static_cast<int>(potential.diag.size()) != potential.d) throw ConfigError("potential.diag: needs d entries");
        for (double x : potential.diag)
            if (!(x > 0.0)) throw ConfigError("potential.diag: entries must be positive");
    }
    if (potential.kind == PotentialSpec::Kind::Quadratic) {
        if (static_cast<int>(potential.matrix.size()) != potential.d)
            throw ConfigError("potential.matrix: needs d rows");
        for (const auto& row : potential.matrix)
            if (static_cast<int>(row.size()) != potential.d) throw ConfigError("potential.matrix: rows need d entries");
        try {
            (void)potential.build();
        }
        catch (const std::exception& e) {
            throw ConfigError(std::string("potential.matrix: ") + e.what());
        }
    }
    if (stationary_start && potential.kind == PotentialSpec::Kind::DoubleWell)
        throw ConfigError("start: stationary starts need a Gaussian potential");
}

std::string config_reference()
{
    return R"(Experiment file keys (TOML subset; every key is optional):
  name = "run"                 label used for curve files
  process = "zz"               rhmc | zz | bps
  gamma = "auto"               refresh rate; auto = rate-optimal gamma
  total_time = "auto"          auto = 10/nu_theory clamped to [5, 500]
  n_chains = 10000
  grid_dt = "auto"             curve resolution; auto = total_time/1000
  observable = "x1"            fitted observable x_k (paired with v_k)
  init_offset = "auto"         x0 per coordinate; auto = 2/sqrt(m)
  start = "fixed"              fixed | stationary (x ~ target, Gaussians only)
  fit_window = "auto"          or [t1, t2]
  fit_snr = 5                  auto window ends below fit_snr standard errors
  fit_start_fraction = 0.25    auto window starts at min(1/nu_theory, fraction * end)
  master_seed = 1
  output_dir = "pdmp-out"
  workers = 0                  0 = OpenMP default; PDMP_WORKERS overrides
  thinning_horizon = 1.0
  leapfrog_step = 0.01         RHMC on non-quadratic potentials
  spectral = false             also compute nu_spec (1D Gaussians)
  spectral_ntrunc = 32
  spectral_horizon = 60
  moments = false              one long chain, moment z-scores instead of a fit
  [potential]
  kind = "isotropic"           isotropic | diagonal | quadratic | double_well
  d = 1
  m = 1.0                      isotropic only
  diag = [1.0, 4.0]            diagonal only
  matrix = [[2, 0.5], [0.5, 1]]  quadratic only
)";
}

}  // namespace pdmp
