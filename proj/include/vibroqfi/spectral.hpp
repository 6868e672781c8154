// spectral.hpp - spectral density matrix and the measured spectrum
//
// S(w1, w2) = <xi~(w1) xi~(w2)^*>, transform convention as in pulse.hpp. On a
// grid of N nodes the frequencies are w_k = (k - N/2) dw, dw = 2 pi / (N h),
// and Delta_w * sum_k S_kk equals Delta_tau * sum_i rho_ii.

#pragma once

#include <string>
#include <vector>

#include "vibroqfi/scatter.hpp"

namespace vibroqfi {

struct SpectralDensityMatrix {
    std::vector<double> omega;
    double domega{0.0};
    Matrix S;
    double p_loss{0.0};

    double trace() const; // domega * sum_k S_kk
};

std::vector<double> omega_grid(const TimeGrid& grid);

// Plain matrix transforms, used for derivatives as well.
Matrix to_frequency(const Matrix& rho, const TimeGrid& grid);
Matrix to_time(const Matrix& S, const TimeGrid& grid);

SpectralDensityMatrix tdm_to_sdm(const TemporalDensityMatrix& tdm);
TemporalDensityMatrix sdm_to_tdm(const SpectralDensityMatrix& sdm, const TimeGrid& grid);

struct SpectrumPoint {
    double omega;
    double total;
    double input;
    double absorption;
    double emission;
};

// Closed-form single-mode SDM: the incident term, the f_k cross terms and the
// C^l_mn double-scattering terms. Construction does the expensive setup.
class AnalyticSdm {
public:
    AnalyticSdm(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath);

    cplx operator()(double w1, double w2) const;
    // diagonal split into input - absorption + emission
    SpectrumPoint components(double w) const;
    const std::vector<std::string>& warnings() const { return warnings_; }

private:
    struct Term {
        int l, m, n;
        double c;
    };
    PulseShape pulse_;
    double Gamma_, a_, omega0_;
    std::vector<std::pair<int, double>> f_;
    std::vector<Term> terms_;
    std::vector<std::string> warnings_;
};

cplx sdm_analytic_single_mode(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                              double w1, double w2);

struct Spectrum {
    std::vector<SpectrumPoint> points;
    std::vector<std::string> warnings;
};

// total = input - absorption + emission, the exact SDM diagonal. Absorption
// dips sit at w = -k Omega0 with weight f_k; the resonant emission lines sit at
// w = +k Omega0 with weight C^k_{-k,-k}.
Spectrum spectrum(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                  const std::vector<double>& omegas);

// columns omega_radps,total,input,absorption,emission
void write_spectrum_csv(const std::string& path, const Spectrum& s);

} // namespace vibroqfi
