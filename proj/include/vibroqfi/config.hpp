// config.hpp - flat dotted key = value sweep configuration
//
//   emitter.gamma_psinv        = 0.15
//   emitter.gamma_perp_ratio   = 0          # Gamma_perp / Gamma
//   bath.kind                  = single_mode  # none | single_mode | drude_lorentz | brownian | tabulated
//   bath.lambda0               = 0.5        # single mode
//   bath.omega0_cm             = 1000       # single mode, brownian
//   bath.lambda_cm             = 35         # continuum reorganization energy
//   bath.gamma_cm              = 100        # continuum cutoff / damping
//   bath.table                 = J.txt      # tabulated: Omega[cm^-1] J[cm^-1]
//   temperature_kelvin         = 0
//   pulse.kind                 = exponential  # exponential | gaussian | sampled
//   pulse.tsigma_over_invgamma = 1
//   pulse.t0_over_invgamma     = 0          # gaussian centre
//   pulse.file                 = xi.txt     # sampled: t[ps] Re Im
//   grid.n                     = 2048
//   grid.window_over_invgamma  = 20
//   grid.rule                  = auto       # auto | cell_averaged | point_sampled
//   estimate.parameter         = gamma      # gamma | huang_rhys
//   sweep.variable             = lambda0    # lambda0 | lambda_cm | temperature_kelvin | gamma_perp_ratio
//   sweep.values               = 0, 0.1, 0.2
//   output.csv                 = out.csv
//   output.svg                 = out.svg
//   output.timing              = true
//   cache.dir                  = /tmp/vqf
//   spectrum.omega_min_radps / spectrum.omega_max_radps / spectrum.points
//
// Relative paths resolve against the directory of the config file.

#pragma once

#include <istream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "vibroqfi/scatter.hpp"

namespace vibroqfi {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& source, int line, const std::string& field, const std::string& what);
    int line;
    std::string field;
};

struct SweepConfig {
    double gamma_psinv{0.15};
    double gamma_perp_ratio{0.0};

    std::string bath_kind{"single_mode"};
    double lambda0{0.0};
    double omega0_cm{1000.0};
    double lambda_cm{0.0};
    double gamma_cm{0.0};
    std::string bath_table;
    double temperature_kelvin{0.0};

    std::string pulse_kind{"exponential"};
    double tsigma_over_invgamma{1.0};
    double t0_over_invgamma{0.0};
    std::string pulse_file;

    int n{2048};
    double window_over_invgamma{20.0};
    KernelRule rule{KernelRule::Auto};

    Parameter estimate{Parameter::Gamma};

    std::string sweep_variable{"lambda0"};
    std::vector<double> values;

    std::string csv_path;
    std::string svg_path;
    bool timing{true};
    std::string cache_dir;

    std::optional<double> spectrum_omega_min;
    std::optional<double> spectrum_omega_max;
    int spectrum_points{4001};

    std::string source{"<config>"};
};

SweepConfig parse_config(std::istream& in, const std::string& source = "<config>",
                         const std::string& base_dir = "");
SweepConfig load_config(const std::string& path);

// Sweep-specific checks (values present, output path given).
void validate_for_sweep(const SweepConfig& cfg);

struct PointSetup {
    PulseShape pulse;
    EmitterParams emitter;
    BathSpec bath;
    TimeGrid grid;
    Parameter theta{Parameter::Gamma};
    KernelRule rule{KernelRule::Auto};
};

// Physical inputs for one sweep value; without a value, the base configuration.
PointSetup setup_point(const SweepConfig& cfg, std::optional<double> value = std::nullopt);

std::string parameter_name(Parameter p);

} // namespace vibroqfi
