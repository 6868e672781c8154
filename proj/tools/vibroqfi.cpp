// vibroqfi - sweep, spectrum and selftest front end
//
// exit codes: 0 ok, 2 configuration (or grid) error, 3 numerical failure

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "vibroqfi/cache.hpp"
#include "vibroqfi/config.hpp"
#include "vibroqfi/spectral.hpp"
#include "vibroqfi/sweep.hpp"
#include "vibroqfi/units.hpp"

using namespace vibroqfi;

namespace {

constexpr int kOk = 0, kConfig = 2, kNumeric = 3;

// fail before hours of work rather than after
void check_writable(const SweepConfig& cfg, const std::string& path, const char* field) {
    if (path.empty()) return;
    std::ofstream probe(path, std::ios::app);
    if (!probe) throw ConfigError(cfg.source, 0, field, "cannot write " + path);
}

int cmd_sweep(const std::string& path, int jobs, bool no_cache) {
    SweepConfig cfg = load_config(path);
    validate_for_sweep(cfg);
    check_writable(cfg, cfg.csv_path, "output.csv");
    check_writable(cfg, cfg.svg_path, "output.svg");
    SweepOptions opt;
    opt.jobs = jobs;
    opt.use_cache = !no_cache;
    opt.log = &std::cerr;
    if (opt.use_cache) std::cerr << "cache: " << cache_directory(cfg.cache_dir).string() << '\n';
    auto rows = run_sweep(cfg, opt);
    write_sweep_csv(cfg.csv_path, cfg, rows);
    std::cerr << "wrote " << cfg.csv_path << '\n';
    if (!cfg.svg_path.empty()) {
        write_sweep_svg(cfg.svg_path, cfg, rows);
        std::cerr << "wrote " << cfg.svg_path << '\n';
    }
    return kOk;
}

int cmd_spectrum(const std::string& path, const std::string& out) {
    SweepConfig cfg = load_config(path);
    PointSetup s = setup_point(cfg);
    if (s.bath.kind != BathKind::None && s.bath.kind != BathKind::SingleMode)
        throw ConfigError(cfg.source, 0, "bath.kind", "the spectrum needs a single_mode or none bath");
    double span = 20.0 * (s.emitter.Gamma + s.emitter.Gamma_perp) + 5.0 / s.pulse.tsigma;
    if (s.bath.kind == BathKind::SingleMode && s.bath.lambda0 > 0.0)
        span += std::min(truncation_order(s.bath.lambda0, s.bath.nbar()), 12) * s.bath.omega0;
    double lo = cfg.spectrum_omega_min.value_or(-span), hi = cfg.spectrum_omega_max.value_or(span);
    if (lo >= hi) throw ConfigError(cfg.source, 0, "spectrum.omega_max_radps", "must exceed the lower end");
    std::vector<double> w(static_cast<std::size_t>(cfg.spectrum_points));
    for (int i = 0; i < cfg.spectrum_points; ++i)
        w[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (cfg.spectrum_points - 1);
    check_writable(cfg, out, "--out");
    Spectrum sp = spectrum(s.pulse, s.emitter, s.bath, w);
    for (const auto& m : sp.warnings) std::cerr << "warning: " << m << '\n';
    write_spectrum_csv(out, sp);
    std::cerr << "wrote " << out << '\n';
    return kOk;
}

int cmd_selftest() {
    const double G = 2.0;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 128, 11.0 / G);
    const double W = units::wavenumber_to_angular(100.0);
    const BathSpec baths[] = {BathSpec::none(), BathSpec::single_mode(0.8, W, 0.0), BathSpec::single_mode(0.5, W, 300.0),
                              BathSpec::drude_lorentz(0.5, 1.9, 300.0), BathSpec::brownian(0.5, 1.9, 18.8, 300.0)};
    bool ok = true;
    for (const auto& bath : baths)
        for (double gp : {0.0, 0.2}) {
            EmitterParams em{G, gp};
            auto fast = build_tdm(pulse, em, bath, grid, KernelRule::PointSampled);
            auto ref = tdm_oracle(pulse, em, bath, grid);
            double err = (fast.rho - ref.rho).cwiseAbs().maxCoeff() / ref.rho.cwiseAbs().maxCoeff();
            double perr = std::abs(fast.p_loss - ref.p_loss);
            bool pass = err <= 1e-6 && perr <= 1e-6 * std::max(ref.p_loss, 1e-300) + 1e-15;
            ok = ok && pass;
            std::printf("%s  rel err %.2e  p_loss err %.2e  Gamma_perp=%.1f  %s\n", pass ? "PASS" : "FAIL", err, perr,
                        gp, bath.describe().c_str());
        }
    std::printf("selftest %s\n", ok ? "passed" : "FAILED");
    return ok ? kOk : kNumeric;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"vibroqfi: Fisher information of a single photon scattered by a vibronic emitter"};
    app.require_subcommand(1);

    std::string config, out;
    int jobs = 1;
    bool no_cache = false;
    auto* sweep = app.add_subcommand("sweep", "run a parameter sweep and write CSV (and SVG)");
    sweep->add_option("--config", config, "configuration file")->required();
    sweep->add_option("--jobs", jobs, "worker threads")->check(CLI::Range(1, 256));
    sweep->add_flag("--no-cache", no_cache, std::string("ignore and do not write the TDM cache (directory override: ") +
                                                kCacheEnv + ")");
    auto* spec = app.add_subcommand("spectrum", "write the scattered spectrum and its components as CSV");
    spec->add_option("--config", config, "configuration file")->required();
    spec->add_option("--out", out, "output CSV")->required();
    auto* self = app.add_subcommand("selftest", "fast algorithm against the direct oracle at N=128");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*sweep) return cmd_sweep(config, jobs, no_cache);
        if (*spec) return cmd_spectrum(config, out);
        if (*self) return cmd_selftest();
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const GridError& e) {
        std::cerr << "grid error: " << e.what() << '\n';
        return kConfig;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumeric;
    } catch (const DomainError& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumeric;
    }
    return kOk;
}
