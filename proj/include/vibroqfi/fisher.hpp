// fisher.hpp - quantum and classical Fisher information of the scattered pulse
//
// Matrices handed to qfi() are operators, i.e. already carry the grid measure
// (step * rho for a TDM). The TDM-level functions apply the measure themselves.

#pragma once

#include <string>
#include <vector>

#include "vibroqfi/scatter.hpp"
#include "vibroqfi/spectral.hpp"

namespace vibroqfi {

struct QfiDetail {
    double value{0.0};
    int dim{0};
    int kept{0};                // eigenvalues above eps_rank * trace / 2
    double min_eigenvalue{0.0}; // relative to the largest
    double discarded{0.0};      // eigenvalue weight below the cutoff, relative to the trace
};

// Q = sum over p_i + p_j > eps_rank * trace of 2 |<i|drho|j>|^2 / (p_i + p_j).
double qfi(const Matrix& rho, const Matrix& drho, double eps_rank = 1e-10);
QfiDetail qfi_detail(const Matrix& rho, const Matrix& drho, double eps_rank = 1e-10);
// One eigendecomposition, several cutoffs (each >= the smallest one).
std::vector<double> qfi_scan(const Matrix& rho, const Matrix& drho, const std::vector<double>& eps_ranks);

// (dp_loss)^2 / p_loss, zero without loss. Throws when p_loss = 0 but dp_loss != 0.
double loss_term(double p_loss, double dp_loss);

double qfi_lossy_total(const TemporalDensityMatrix& tdm, const TdmDerivative& d, double eps_rank = 1e-10);

// Diagonal measurements. Bins below 1e-14 of the largest are skipped.
double cfi_time(const TemporalDensityMatrix& tdm, const TdmDerivative& d);
double cfi_frequency(const SpectralDensityMatrix& sdm, const Matrix& dS, double dp_loss);

// sum_k f_k int g(w + k Omega0) |xi~(w)|^2 dw, g(w) = 64 w^2 / (Gamma^2 + 4 w^2)^2.
// The shift sign follows the e^{-i w tau} transform used throughout.
double qfi_bound_single_mode(const PulseShape& pulse, double Gamma, double lambda0, double nbar, double omega0,
                             int K = -1);
// Time-domain route, any bath. Without a grid one is chosen from Gamma and the pulse.
double qfi_bound_general(const PulseShape& pulse, double Gamma, const BathSpec& bath, const TimeGrid& grid);
double qfi_bound_general(const PulseShape& pulse, double Gamma, const BathSpec& bath);

double q_no_vibration(const PulseShape& pulse, double Gamma);

struct FisherReport {
    Parameter parameter{Parameter::Gamma};
    double qfi{0.0};       // lossy total, 1/param^2
    double qfi_bound{0.0}; // NaN where no bound applies
    double cfi_time{0.0};
    double cfi_frequency{0.0};
    double p_loss{0.0};
    double loss_term{0.0};
    QfiDetail detail;
    double rank_sensitivity{0.0}; // |Q(eps/100) - Q(eps)| / Q
    TimeGrid grid;
    std::vector<std::string> diagnostics;
};

struct FisherOptions {
    double eps_rank{1e-10};
    KernelRule rule{KernelRule::Auto};
    bool with_bound{true};
};

// The bound needs pulse and bath; pass NaN to skip it.
FisherReport fisher_report(const TemporalDensityMatrix& tdm, const TdmDerivative& d, Parameter theta,
                           double qfi_bound, double eps_rank = 1e-10);

FisherReport fisher_report(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                           const TimeGrid& grid, Parameter theta, const FisherOptions& options = {});

// Bound matching the estimation problem, NaN when it does not apply (Gamma_perp > 0, theta = lambda0).
double applicable_bound(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                        const TimeGrid& grid, Parameter theta);

} // namespace vibroqfi
