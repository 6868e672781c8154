// sweep.hpp - parameter sweeps over the Fisher-information pipeline

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vibroqfi/config.hpp"
#include "vibroqfi/fisher.hpp"

namespace vibroqfi {

struct SweepRow {
    double value{0.0};
    double qfi{0.0};
    double qfi_bound{0.0};
    double cfi_time{0.0};
    double cfi_freq{0.0};
    double p_loss{0.0};
    int n{0};
    double window{0.0}; // ps
    double elapsed_ms{0.0};
    bool from_cache{false};
    double gamma{0.0}; // for the dimensionless plot axis
    std::vector<std::string> diagnostics;
};

struct SweepOptions {
    int jobs{1};
    bool use_cache{true};
    std::ostream* log{nullptr}; // progress and diagnostics, one line each
};

// Rows come back in the order of cfg.values whatever the completion order.
// The first failing point (in that order) rethrows its exception.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg, const SweepOptions& options = {});

SweepRow run_point(const SweepConfig& cfg, double value, bool use_cache);

inline constexpr const char* kSweepHeader =
    "sweep_var,sweep_value,qfi,qfi_bound,cfi_time,cfi_freq,p_loss,n,window,elapsed_ms";

void write_sweep_csv(std::ostream& os, const SweepConfig& cfg, const std::vector<SweepRow>& rows);
void write_sweep_csv(const std::string& path, const SweepConfig& cfg, const std::vector<SweepRow>& rows);

// Fisher informations against the swept variable; times Gamma^2 when estimating Gamma.
void write_sweep_svg(const std::string& path, const SweepConfig& cfg, const std::vector<SweepRow>& rows);

} // namespace vibroqfi
