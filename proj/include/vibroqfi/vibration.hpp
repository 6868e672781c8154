// vibration.hpp - spectral densities, dephasing propagators and Franck-Condon series

#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "vibroqfi/units.hpp"

namespace vibroqfi {

using cplx = std::complex<double>;

struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct UnsupportedRegime : DomainError {
    using DomainError::DomainError;
};

enum class BathKind { None, SingleMode, DrudeLorentz, Brownian, Tabulated };

// J(Omega) sampled on an increasing Omega grid, both in rad/ps; linear in between,
// zero beyond the last sample, pinned to J(0) = 0 below the first.
struct SpectralTable {
    std::vector<double> omega;
    std::vector<double> J;

    double operator()(double w) const;
};

// Two columns (Omega[cm^-1], J[cm^-1]); '#' starts a comment.
SpectralTable load_spectral_table(const std::string& path);

struct BathSpec {
    BathKind kind{BathKind::None};
    double lambda0{0.0};     // Huang-Rhys factor (single mode)
    double omega0{0.0};      // mode / oscillator frequency, rad/ps
    double lambda{0.0};      // reorganization energy, rad/ps
    double gamma{0.0};       // cutoff / damping, rad/ps
    double temperature{0.0}; // K
    std::shared_ptr<const SpectralTable> table;

    static BathSpec none();
    static BathSpec single_mode(double lambda0, double omega0, double T);
    static BathSpec drude_lorentz(double lambda, double gamma, double T);
    static BathSpec brownian(double lambda, double gamma, double omega0, double T);
    static BathSpec tabulated(SpectralTable J, double T);

    void validate() const;
    double nbar() const;            // single mode only
    double reorganization() const;  // lambda0*omega0 for the single mode
    double frequency_scale() const; // fastest bath frequency
    bool continuum() const { return kind == BathKind::DrudeLorentz || kind == BathKind::Brownian || kind == BathKind::Tabulated; }
    std::string describe() const;
};

double spectral_density(const BathSpec& bath, double omega);

cplx lambda1(const BathSpec& bath, double t);

// Adaptive quadrature of int_0^inf J/W^2 [coth(bW/2)(cos Wt - 1) + i sin Wt] dW.
// `scale` is a characteristic frequency of J used to place panels; `knots`
// are extra breakpoints (kinks of a tabulated J). `support` truncates the
// integral when J vanishes beyond it (<= 0 means unbounded).
cplx lambda1_quadrature(const std::function<double(double)>& J, double T, double t,
                        double scale, const std::vector<double>& knots = {}, double support = 0.0);
cplx lambda1_quadrature(const BathSpec& bath, double t);

cplx lambda2(const BathSpec& bath, double t1, double t2, double tau, double taup);

// Lambda_1 on integer lags k*h, k in [-(n-1), n-1]; at(k) with negative k allowed.
struct Lambda1Table {
    double h{0.0};
    int n{0};
    std::vector<cplx> values; // index k + n - 1

    cplx at(int k) const { return values[static_cast<std::size_t>(k + n - 1)]; }
};

Lambda1Table lambda1_table(const BathSpec& bath, double h, int n);

double franck_condon_f(int k, double lambda0, double nbar);
double franck_condon_d(int k, double lambda0, double nbar);
int truncation_order(double lambda0, double nbar);

struct FcSeries {
    int K{0};
    double lambda0{0.0};
    double nbar{1.0};
    int span{0};          // storage covers [-span, span], span = 3K
    std::vector<double> f;
    std::vector<double> d;

    static FcSeries make(double lambda0, double nbar, int K = -1);
    double f_at(int k) const { return std::abs(k) <= span ? f[static_cast<std::size_t>(k + span)] : 0.0; }
    double d_at(int k) const { return std::abs(k) <= span ? d[static_cast<std::size_t>(k + span)] : 0.0; }
};

// truncated triple sum over k3, k4, k6 in [-K, K]
double coefficient_C(int l, int m, int n, const FcSeries& series);

// All C^l_mn at once from a 3D FFT of exp(Lambda_2) on the torus; agrees
// with coefficient_C and is what the single-mode TDM path uses.
struct CTensor {
    int P{0};
    std::vector<double> data; // real parts, row-major [a][b][c] of torus coefficients

    // C^l_mn; zero outside the representable range
    double operator()(int l, int m, int n) const;
    int reach() const { return P / 2 - 1; }
};

// torus > 0 fixes the torus size instead of growing it until the edge is negligible
CTensor c_tensor(double lambda0, double nbar, int K = -1, int torus = 0);

} // namespace vibroqfi
