// scatter.hpp - scattered-pulse temporal density matrix and excitation dynamics

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "vibroqfi/pulse.hpp"
#include "vibroqfi/vibration.hpp"

namespace vibroqfi {

using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using Fingerprint = std::array<std::uint8_t, 32>;

struct GridError : DomainError {
    using DomainError::DomainError;
};

struct EmitterParams {
    double Gamma{0.15};    // detected-channel rate, 1/ps
    double Gamma_perp{0.0}; // undetected-channel rate, 1/ps

    void validate() const;
    double kappa() const { return 0.5 * (Gamma + Gamma_perp); }
};

struct TimeGrid {
    double tau0{0.0};
    double tau_end{0.0};
    int n{0};

    static TimeGrid make(double tau0, double tau_end, int n);
    double step() const { return (tau_end - tau0) / (n - 1); }
    double at(int i) const { return tau0 + i * step(); }
    double window() const { return tau_end - tau0; }
};

// Window of length `window` (ps) that starts 5% of its length before the pulse
// onset, shifted so the onset falls midway between two nodes.
TimeGrid default_grid(const PulseShape& pulse, int n, double window);

// CellAveraged: xi piecewise constant on cells, kernels integrated exactly per
// cell (single-mode and no-vibration baths). PointSampled: trapezoid rule with
// Theta(0) = 1/2 on a tabulated Lambda_1 (any bath; what tdm_oracle computes).
enum class KernelRule { Auto, CellAveraged, PointSampled };

KernelRule resolve_rule(const BathSpec& bath, KernelRule rule);

// Throws GridError when the grid cannot resolve the problem; returns warnings.
std::vector<std::string> check_grid(const TimeGrid& grid, const PulseShape& pulse, const EmitterParams& emitter,
                                    const BathSpec& bath, KernelRule rule);

struct TemporalDensityMatrix {
    TimeGrid grid;
    Matrix rho;        // density values rho(tau_i, tau_j); operator is step * rho
    double p_loss{0.0};
    Fingerprint fingerprint{};
    std::vector<std::string> diagnostics;

    double trace() const; // step * sum_i rho_ii
};

enum class Parameter { Gamma, HuangRhys };

struct TdmDerivative {
    Matrix drho;
    double dp_loss{0.0};
    std::vector<std::string> diagnostics;
};

struct ExcitationCurve {
    TimeGrid grid;
    std::vector<double> pe;    // p_e(tau_i)
    std::vector<double> ploss; // Gamma_perp * int_{tau_0}^{tau_i} p_e
    double ploss_total{0.0};   // including the tail past the window
};

Fingerprint params_fingerprint(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                               const TimeGrid& grid, KernelRule rule, const std::string& tag = "tdm");
std::string to_hex(const Fingerprint& f);

ExcitationCurve excitation_curve(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                                 const TimeGrid& grid, KernelRule rule = KernelRule::Auto);

// Single time points on an automatically chosen grid of n nodes covering t.
// loss_probability accepts t = +inf for the asymptotic value.
double excitation_probability(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath, double t,
                              int n = 4096);
double loss_probability(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath, double t,
                        int n = 4096);

TemporalDensityMatrix build_tdm(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                                const TimeGrid& grid, KernelRule rule = KernelRule::Auto);

// Nested trapezoid sums of the same PointSampled discretization, no FFT; N <= 256.
TemporalDensityMatrix tdm_oracle(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                                 const TimeGrid& grid);

TdmDerivative tdm_derivative(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                             const TimeGrid& grid, Parameter theta, KernelRule rule = KernelRule::Auto);

// Both at once; the Gamma derivative shares all convolutions with the TDM.
std::pair<TemporalDensityMatrix, TdmDerivative> build_tdm_with_derivative(const PulseShape& pulse,
                                                                          const EmitterParams& emitter,
                                                                          const BathSpec& bath, const TimeGrid& grid,
                                                                          Parameter theta,
                                                                          KernelRule rule = KernelRule::Auto);

// Time-domain form of the Fisher-information bound (Gamma_perp = 0), on a grid.
double qfi_bound_time_domain(const PulseShape& pulse, double Gamma, const BathSpec& bath, const TimeGrid& grid,
                             KernelRule rule = KernelRule::Auto);

} // namespace vibroqfi
