// spectral.cpp - time/frequency transforms of the TDM and the analytic spectra

#include "vibroqfi/spectral.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "fft.hpp"

namespace vibroqfi {

double SpectralDensityMatrix::trace() const { return domega * S.diagonal().real().sum(); }

std::vector<double> omega_grid(const TimeGrid& grid) {
    const int N = grid.n;
    double dw = 2.0 * units::pi / (N * grid.step());
    std::vector<double> w(static_cast<std::size_t>(N));
    for (int k = 0; k < N; ++k) w[static_cast<std::size_t>(k)] = (k - N / 2) * dw;
    return w;
}

namespace {

// U_kj = e^{-i w_k tau_j} = phase_k (-1)^j F_kj with F the forward DFT
// S = (h^2 / 2 pi) U rho U^+
Matrix transform(const Matrix& in, const TimeGrid& grid, bool forward) {
    const int N = grid.n;
    if (in.rows() != N || in.cols() != N) throw DomainError("matrix does not match the grid");
    const double h = grid.step();
    auto w = omega_grid(grid);
    Vector phase(N);
    for (int k = 0; k < N; ++k) phase(k) = std::polar(1.0, -w[static_cast<std::size_t>(k)] * grid.tau0);
    Matrix X = in;
    using detail::FftPlan;
    if (forward) {
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i)
                if ((i + j) & 1) X(i, j) = -X(i, j);
        auto cols = FftPlan::many(N, N, 1, N, FFTW_FORWARD);
        auto rows = FftPlan::many(N, N, N, 1, FFTW_BACKWARD);
        cols.execute(X.data(), X.data());
        rows.execute(X.data(), X.data());
        X = (h * h / (2.0 * units::pi)) * (phase.asDiagonal() * X * phase.conjugate().asDiagonal());
    } else {
        // rho = (2 pi / (h^2 N^2)) U^+ S U
        X = phase.conjugate().asDiagonal() * X * phase.asDiagonal();
        auto cols = FftPlan::many(N, N, 1, N, FFTW_BACKWARD);
        auto rows = FftPlan::many(N, N, N, 1, FFTW_FORWARD);
        cols.execute(X.data(), X.data());
        rows.execute(X.data(), X.data());
        for (int j = 0; j < N; ++j)
            for (int i = 0; i < N; ++i)
                if ((i + j) & 1) X(i, j) = -X(i, j);
        X *= 2.0 * units::pi / (h * h * N * static_cast<double>(N));
    }
    return 0.5 * (X + X.adjoint());
}

} // namespace

Matrix to_frequency(const Matrix& rho, const TimeGrid& grid) { return transform(rho, grid, true); }
Matrix to_time(const Matrix& S, const TimeGrid& grid) { return transform(S, grid, false); }

SpectralDensityMatrix tdm_to_sdm(const TemporalDensityMatrix& tdm) {
    SpectralDensityMatrix s;
    s.omega = omega_grid(tdm.grid);
    s.domega = 2.0 * units::pi / (tdm.grid.n * tdm.grid.step());
    s.S = to_frequency(tdm.rho, tdm.grid);
    s.p_loss = tdm.p_loss;
    return s;
}

TemporalDensityMatrix sdm_to_tdm(const SpectralDensityMatrix& sdm, const TimeGrid& grid) {
    TemporalDensityMatrix t;
    t.grid = grid;
    t.rho = to_time(sdm.S, grid);
    t.p_loss = sdm.p_loss;
    return t;
}

AnalyticSdm::AnalyticSdm(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath)
    : pulse_(pulse), Gamma_(em.Gamma), a_(em.Gamma + em.Gamma_perp), omega0_(0.0) {
    em.validate();
    bath.validate();
    if (bath.kind != BathKind::SingleMode && bath.kind != BathKind::None)
        throw DomainError("the analytic spectral density matrix needs a single-mode bath");
    if (bath.kind == BathKind::None || bath.lambda0 == 0.0) {
        f_.emplace_back(0, 1.0);
        terms_.push_back({0, 0, 0, 1.0});
        if (bath.kind == BathKind::SingleMode) omega0_ = bath.omega0;
        return;
    }
    omega0_ = bath.omega0;
    double nb = bath.nbar();
    FcSeries fc = FcSeries::make(bath.lambda0, nb);
    double fsum = 0.0;
    for (int k = -fc.K; k <= fc.K; ++k) {
        double f = fc.f_at(k);
        fsum += f;
        if (f > 1e-16) f_.emplace_back(k, f);
    }
    CTensor C = c_tensor(bath.lambda0, nb, fc.K);
    const int R = C.reach();
    double csum = 0.0;
    for (int l = -R; l <= R; ++l)
        for (int m = -R; m <= R; ++m)
            for (int n = -R; n <= R; ++n) {
                double c = C(l, m, n);
                csum += c;
                if (std::abs(c) > 1e-15) terms_.push_back({l, m, n, c});
            }
    if (std::abs(1.0 - fsum) > 1e-8 || std::abs(1.0 - csum) > 1e-8)
        warnings_.push_back("Franck-Condon series truncation tail exceeds 1e-8");
}

cplx AnalyticSdm::operator()(double w1, double w2) const {
    const double G = Gamma_, a = a_, W = omega0_;
    const cplx i(0.0, 1.0);
    cplx x1 = pulse_freq(pulse_, w1), x2 = std::conj(pulse_freq(pulse_, w2));
    cplx cross = 0.0;
    for (const auto& [k, f] : f_) cross += f / ((a + 2.0 * i * (w1 + k * W)) * (a - 2.0 * i * (w2 + k * W)));
    cplx second = 0.0;
    int last_l = 1 << 30;
    cplx xl = 0.0;
    for (const auto& t : terms_) {
        if (t.l != last_l) {
            xl = pulse_freq(pulse_, w1 - t.l * W) * std::conj(pulse_freq(pulse_, w2 - t.l * W));
            last_l = t.l;
        }
        second += t.c * xl / ((a + 2.0 * i * (w1 + t.m * W)) * (a - 2.0 * i * (w2 + t.n * W)));
    }
    return x1 * x2 * (1.0 - 4.0 * G * (a + i * (w1 - w2)) * cross) + 4.0 * G * G * second;
}

SpectrumPoint AnalyticSdm::components(double w) const {
    const double G = Gamma_, a = a_, W = omega0_;
    const cplx i(0.0, 1.0);
    SpectrumPoint p{w, 0.0, std::norm(pulse_freq(pulse_, w)), 0.0, 0.0};
    double s = 0.0;
    for (const auto& [k, f] : f_) s += f / (a * a + 4.0 * (w + k * W) * (w + k * W));
    p.absorption = 4.0 * G * a * p.input * s;
    cplx e = 0.0;
    int last_l = 1 << 30;
    double xl = 0.0;
    for (const auto& t : terms_) {
        if (t.l != last_l) {
            xl = std::norm(pulse_freq(pulse_, w - t.l * W));
            last_l = t.l;
        }
        e += t.c * xl / ((a + 2.0 * i * (w + t.m * W)) * (a - 2.0 * i * (w + t.n * W)));
    }
    p.emission = 4.0 * G * G * e.real();
    p.total = p.input - p.absorption + p.emission;
    return p;
}

cplx sdm_analytic_single_mode(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath, double w1,
                              double w2) {
    return AnalyticSdm(pulse, em, bath)(w1, w2);
}

Spectrum spectrum(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                  const std::vector<double>& omegas) {
    AnalyticSdm sdm(pulse, em, bath);
    Spectrum out;
    out.warnings = sdm.warnings();
    if (bath.kind == BathKind::SingleMode && bath.lambda0 > 0.0) {
        if (em.Gamma >= bath.omega0 / 10.0)
            out.warnings.push_back("line assignment assumes Gamma << Omega0 (Gamma < Omega0/10 not met)");
        if (pulse.tsigma * bath.omega0 <= 10.0)
            out.warnings.push_back("line assignment assumes Tsigma*Omega0 >> 1 (Tsigma*Omega0 > 10 not met)");
    }
    out.points.reserve(omegas.size());
    for (double w : omegas) out.points.push_back(sdm.components(w));
    return out;
}

void write_spectrum_csv(const std::string& path, const Spectrum& s) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "omega_radps,total,input,absorption,emission\n";
    char buf[256];
    for (const auto& p : s.points) {
        std::snprintf(buf, sizeof buf, "%.12g,%.12g,%.12g,%.12g,%.12g\n", p.omega, p.total, p.input, p.absorption,
                      p.emission);
        os << buf;
    }
}

} // namespace vibroqfi
