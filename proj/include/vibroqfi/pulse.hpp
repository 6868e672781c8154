// pulse.hpp - incident single-photon envelopes xi(t) and their transforms
//
// Transform convention shared by every module:
//   xi~(w) = (2 pi)^{-1/2} int dt e^{-i w t} xi(t)

#pragma once

#include <complex>
#include <string>
#include <vector>

namespace vibroqfi {

using cplx = std::complex<double>;

enum class PulseKind { DecayingExponential, Gaussian, Sampled };

struct PulseShape {
    PulseKind kind{PulseKind::DecayingExponential};
    double tsigma{1.0}; // standard deviation of |xi|^2, ps
    double t0{0.0};     // Gaussian centre (not a shape used in the scattering formulas' derivation)
    std::vector<double> ts; // sampled knots, linear in between, zero outside
    std::vector<cplx> xs;

    static PulseShape exponential(double tsigma);
    static PulseShape gaussian(double tsigma, double t0 = 0.0);
    static PulseShape sampled(std::vector<double> ts, std::vector<cplx> xs, bool normalize = true);

    double onset() const; // earliest time with non-negligible amplitude
    double norm2() const; // int |xi|^2 dt
    std::string describe() const;
};

// two or three columns: t[ps], Re xi[, Im xi]; '#' comments
PulseShape load_sampled_pulse(const std::string& path, bool normalize = true);

cplx pulse_time(const PulseShape& p, double t);
cplx pulse_freq(const PulseShape& p, double w);

} // namespace vibroqfi
