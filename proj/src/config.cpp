// config.cpp - dotted key = value parser and mapping to physical inputs

#include "vibroqfi/config.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <set>

#include "vibroqfi/units.hpp"

namespace vibroqfi {

namespace fs = std::filesystem;

ConfigError::ConfigError(const std::string& source, int line_, const std::string& field_, const std::string& what)
    : std::runtime_error(source + (line_ > 0 ? ":" + std::to_string(line_) : std::string()) +
                         (field_.empty() ? std::string() : ": " + field_) + ": " + what),
      line(line_), field(field_) {}

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

struct Ctx {
    std::string source;
    int line;
    std::string key;
    [[noreturn]] void fail(const std::string& what) const { throw ConfigError(source, line, key, what); }
};

double to_double(const Ctx& c, const std::string& v) {
    double x = 0.0;
    auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size() || !std::isfinite(x)) c.fail("not a number: '" + v + "'");
    return x;
}

double nonneg(const Ctx& c, const std::string& v) {
    double x = to_double(c, v);
    if (x < 0.0) c.fail("must be non-negative");
    return x;
}

double positive(const Ctx& c, const std::string& v) {
    double x = to_double(c, v);
    if (!(x > 0.0)) c.fail("must be positive");
    return x;
}

bool to_bool(const Ctx& c, const std::string& v) {
    if (v == "true" || v == "yes" || v == "1") return true;
    if (v == "false" || v == "no" || v == "0") return false;
    c.fail("expected true or false");
}

std::string one_of(const Ctx& c, const std::string& v, std::initializer_list<const char*> allowed) {
    std::string list;
    for (const char* a : allowed) {
        if (v == a) return v;
        list += (list.empty() ? "" : ", ") + std::string(a);
    }
    c.fail("expected one of " + list);
}

std::string resolve(const std::string& base, const std::string& p) {
    if (p.empty() || base.empty() || fs::path(p).is_absolute()) return p;
    return (fs::path(base) / p).lexically_normal().string();
}

} // namespace

SweepConfig parse_config(std::istream& in, const std::string& source, const std::string& base) {
    SweepConfig cfg;
    cfg.source = source;
    using Setter = std::function<void(const Ctx&, const std::string&)>;
    const std::map<std::string, Setter> setters{
        {"emitter.gamma_psinv", [&](auto& c, auto& v) { cfg.gamma_psinv = positive(c, v); }},
        {"emitter.gamma_perp_ratio", [&](auto& c, auto& v) { cfg.gamma_perp_ratio = nonneg(c, v); }},
        {"bath.kind",
         [&](auto& c, auto& v) {
             cfg.bath_kind = one_of(c, v, {"none", "single_mode", "drude_lorentz", "brownian", "tabulated"});
         }},
        {"bath.lambda0", [&](auto& c, auto& v) { cfg.lambda0 = nonneg(c, v); }},
        {"bath.omega0_cm", [&](auto& c, auto& v) { cfg.omega0_cm = positive(c, v); }},
        {"bath.lambda_cm", [&](auto& c, auto& v) { cfg.lambda_cm = nonneg(c, v); }},
        {"bath.gamma_cm", [&](auto& c, auto& v) { cfg.gamma_cm = positive(c, v); }},
        {"bath.table", [&](auto&, auto& v) { cfg.bath_table = resolve(base, v); }},
        {"temperature_kelvin", [&](auto& c, auto& v) { cfg.temperature_kelvin = nonneg(c, v); }},
        {"pulse.kind", [&](auto& c, auto& v) { cfg.pulse_kind = one_of(c, v, {"exponential", "gaussian", "sampled"}); }},
        {"pulse.tsigma_over_invgamma", [&](auto& c, auto& v) { cfg.tsigma_over_invgamma = positive(c, v); }},
        {"pulse.t0_over_invgamma", [&](auto& c, auto& v) { cfg.t0_over_invgamma = to_double(c, v); }},
        {"pulse.file", [&](auto&, auto& v) { cfg.pulse_file = resolve(base, v); }},
        {"grid.n",
         [&](auto& c, auto& v) {
             double x = to_double(c, v);
             int n = static_cast<int>(x);
             if (n != x || n < 16 || (n & (n - 1)) != 0) c.fail("must be a power of two >= 16");
             cfg.n = n;
         }},
        {"grid.window_over_invgamma", [&](auto& c, auto& v) { cfg.window_over_invgamma = positive(c, v); }},
        {"grid.rule",
         [&](auto& c, auto& v) {
             auto r = one_of(c, v, {"auto", "cell_averaged", "point_sampled"});
             cfg.rule = r == "auto" ? KernelRule::Auto
                                    : r == "cell_averaged" ? KernelRule::CellAveraged : KernelRule::PointSampled;
         }},
        {"estimate.parameter",
         [&](auto& c, auto& v) {
             cfg.estimate = one_of(c, v, {"gamma", "huang_rhys"}) == "gamma" ? Parameter::Gamma : Parameter::HuangRhys;
         }},
        {"sweep.variable",
         [&](auto& c, auto& v) {
             cfg.sweep_variable = one_of(c, v, {"lambda0", "lambda_cm", "temperature_kelvin", "gamma_perp_ratio"});
         }},
        {"sweep.values",
         [&](auto& c, auto& v) {
             cfg.values.clear();
             std::size_t at = 0;
             while (at <= v.size()) {
                 auto comma = v.find(',', at);
                 std::string item = trim(v.substr(at, comma == std::string::npos ? std::string::npos : comma - at));
                 if (item.empty()) {
                     if (comma == std::string::npos && at == 0) break;
                     c.fail("empty list entry");
                 }
                 cfg.values.push_back(to_double(c, item));
                 if (comma == std::string::npos) break;
                 at = comma + 1;
             }
         }},
        {"output.csv", [&](auto&, auto& v) { cfg.csv_path = resolve(base, v); }},
        {"output.svg", [&](auto&, auto& v) { cfg.svg_path = resolve(base, v); }},
        {"output.timing", [&](auto& c, auto& v) { cfg.timing = to_bool(c, v); }},
        {"cache.dir", [&](auto&, auto& v) { cfg.cache_dir = resolve(base, v); }},
        {"spectrum.omega_min_radps", [&](auto& c, auto& v) { cfg.spectrum_omega_min = to_double(c, v); }},
        {"spectrum.omega_max_radps", [&](auto& c, auto& v) { cfg.spectrum_omega_max = to_double(c, v); }},
        {"spectrum.points",
         [&](auto& c, auto& v) {
             double x = to_double(c, v);
             if (x < 2 || x > 1e7 || x != static_cast<int>(x)) c.fail("must be an integer in [2, 1e7]");
             cfg.spectrum_points = static_cast<int>(x);
         }},
    };

    std::set<std::string> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        Ctx c{source, lineno, ""};
        if (eq == std::string::npos) c.fail("expected key = value");
        c.key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        auto it = setters.find(c.key);
        if (it == setters.end()) c.fail("unknown key");
        if (!seen.insert(c.key).second) c.fail("duplicate key");
        if (value.empty() && c.key != "sweep.values") c.fail("missing value");
        it->second(c, value);
    }
    if (in.bad()) throw ConfigError(source, 0, "", "read error");

    auto require = [&](bool ok, const char* key, const char* what) {
        if (!ok) throw ConfigError(source, 0, key, what);
    };
    require(cfg.bath_kind != "tabulated" || !cfg.bath_table.empty(), "bath.table", "required for tabulated baths");
    require(cfg.pulse_kind != "sampled" || !cfg.pulse_file.empty(), "pulse.file", "required for sampled pulses");
    require((cfg.bath_kind != "drude_lorentz" && cfg.bath_kind != "brownian") || cfg.gamma_cm > 0.0, "bath.gamma_cm",
            "required for this bath kind");
    require(!cfg.spectrum_omega_min || !cfg.spectrum_omega_max || *cfg.spectrum_omega_min < *cfg.spectrum_omega_max,
            "spectrum.omega_max_radps", "must exceed spectrum.omega_min_radps");
    return cfg;
}

SweepConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError(path, 0, "", "cannot open config file");
    auto dir = fs::path(path).parent_path().string();
    return parse_config(in, path, dir.empty() ? "." : dir);
}

void validate_for_sweep(const SweepConfig& cfg) {
    if (cfg.values.empty()) throw ConfigError(cfg.source, 0, "sweep.values", "sweep needs at least one value");
    if (cfg.csv_path.empty()) throw ConfigError(cfg.source, 0, "output.csv", "required for a sweep");
    if (cfg.sweep_variable == "lambda0" && cfg.bath_kind != "single_mode")
        throw ConfigError(cfg.source, 0, "sweep.variable", "lambda0 sweeps need bath.kind = single_mode");
    if (cfg.sweep_variable == "lambda_cm" && cfg.bath_kind != "drude_lorentz" && cfg.bath_kind != "brownian")
        throw ConfigError(cfg.source, 0, "sweep.variable", "lambda_cm sweeps need a drude_lorentz or brownian bath");
    for (double v : cfg.values)
        if (v < 0.0) throw ConfigError(cfg.source, 0, "sweep.values", "values must be non-negative");
}

PointSetup setup_point(const SweepConfig& base, std::optional<double> value) {
    SweepConfig cfg = base;
    if (value) {
        if (cfg.sweep_variable == "lambda0") cfg.lambda0 = *value;
        else if (cfg.sweep_variable == "lambda_cm") cfg.lambda_cm = *value;
        else if (cfg.sweep_variable == "temperature_kelvin") cfg.temperature_kelvin = *value;
        else cfg.gamma_perp_ratio = *value;
    }
    PointSetup s;
    const double G = cfg.gamma_psinv;
    s.emitter = EmitterParams{G, cfg.gamma_perp_ratio * G};
    const double T = cfg.temperature_kelvin;
    using units::wavenumber_to_angular;
    if (cfg.bath_kind == "none") s.bath = BathSpec::none();
    else if (cfg.bath_kind == "single_mode")
        s.bath = BathSpec::single_mode(cfg.lambda0, wavenumber_to_angular(cfg.omega0_cm), T);
    else if (cfg.bath_kind == "drude_lorentz")
        s.bath = BathSpec::drude_lorentz(wavenumber_to_angular(cfg.lambda_cm), wavenumber_to_angular(cfg.gamma_cm), T);
    else if (cfg.bath_kind == "brownian")
        s.bath = BathSpec::brownian(wavenumber_to_angular(cfg.lambda_cm), wavenumber_to_angular(cfg.gamma_cm),
                                    wavenumber_to_angular(cfg.omega0_cm), T);
    else
        s.bath = BathSpec::tabulated(load_spectral_table(cfg.bath_table), T);

    const double inv = 1.0 / G;
    if (cfg.pulse_kind == "exponential") s.pulse = PulseShape::exponential(cfg.tsigma_over_invgamma * inv);
    else if (cfg.pulse_kind == "gaussian")
        s.pulse = PulseShape::gaussian(cfg.tsigma_over_invgamma * inv, cfg.t0_over_invgamma * inv);
    else
        s.pulse = load_sampled_pulse(cfg.pulse_file);

    s.grid = default_grid(s.pulse, cfg.n, cfg.window_over_invgamma * inv);
    s.theta = cfg.estimate;
    s.rule = cfg.rule;
    return s;
}

std::string parameter_name(Parameter p) { return p == Parameter::Gamma ? "gamma" : "huang_rhys"; }

} // namespace vibroqfi
