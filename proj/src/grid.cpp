// grid.cpp - time grids, resolution checks and shared helpers

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <openssl/sha.h>

#include "internal.hpp"
#include "vibroqfi/units.hpp"

namespace vibroqfi {

void EmitterParams::validate() const {
    if (!(Gamma >= 0.0) || !std::isfinite(Gamma)) throw DomainError("Gamma must be finite and >= 0");
    if (!(Gamma_perp >= 0.0) || !std::isfinite(Gamma_perp)) throw DomainError("Gamma_perp must be finite and >= 0");
}

TimeGrid TimeGrid::make(double tau0, double tau_end, int n) {
    if (n < 16 || (n & (n - 1)) != 0) throw GridError("grid size must be a power of two >= 16");
    if (!(tau_end > tau0) || !std::isfinite(tau0) || !std::isfinite(tau_end))
        throw GridError("grid window must be a finite, non-empty interval");
    return TimeGrid{tau0, tau_end, n};
}

TimeGrid default_grid(const PulseShape& pulse, int n, double window) {
    if (!(window > 0.0) || !std::isfinite(window)) throw GridError("window must be positive");
    if (n < 16 || (n & (n - 1)) != 0) throw GridError("grid size must be a power of two >= 16");
    double h = window / (n - 1);
    double lead = 0.05 * window;
    double i0 = std::max(0.0, std::round(lead / h - 0.5));
    double tau0 = pulse.onset() - (i0 + 0.5) * h;
    return TimeGrid::make(tau0, tau0 + (n - 1) * h, n);
}

KernelRule resolve_rule(const BathSpec& bath, KernelRule rule) {
    if (rule == KernelRule::Auto) return bath.continuum() ? KernelRule::PointSampled : KernelRule::CellAveraged;
    if (rule == KernelRule::CellAveraged && bath.continuum())
        throw DomainError("cell-averaged kernels are only available for single-mode and no-vibration baths");
    return rule;
}

namespace {

std::string fmt(const char* f, double a, double b = 0.0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b);
    return buf;
}

} // namespace

std::vector<std::string> check_grid(const TimeGrid& grid, const PulseShape& pulse, const EmitterParams& emitter,
                                    const BathSpec& bath, KernelRule rule) {
    rule = resolve_rule(bath, rule);
    std::vector<std::string> warn;
    double h = grid.step();
    double rate = emitter.Gamma + emitter.Gamma_perp;
    if (rate > 0.0 && h > 0.1 / rate)
        throw GridError(fmt("time step %.4g ps exceeds 0.1/(Gamma+Gamma_perp) = %.4g ps", h, 0.1 / rate));
    if (pulse.kind != PulseKind::Sampled && h > 0.1 * pulse.tsigma)
        throw GridError(fmt("time step %.4g ps does not resolve the pulse (Tsigma = %.4g ps)", h, pulse.tsigma));
    double onset = pulse.onset();
    if (rate > 0.0 && grid.tau_end - onset < 10.0 / rate)
        throw GridError(fmt("window ends %.4g ps after the pulse onset; need at least 10/(Gamma+Gamma_perp) = %.4g ps",
                            grid.tau_end - onset, 10.0 / rate));
    if (grid.tau0 > onset) warn.push_back("window starts after the pulse onset; the pulse is truncated");
    if (rule == KernelRule::PointSampled && bath.kind != BathKind::None) {
        double s = bath.frequency_scale() * h;
        if (s > 1.0)
            throw GridError(fmt("bath frequency scale times step is %.3g > 1; refine the grid", s));
        if (s > 0.1) warn.push_back(fmt("bath frequency scale times step is %.3g; discretization error may be visible", s));
    }
    if (rule == KernelRule::CellAveraged && bath.kind == BathKind::SingleMode && bath.lambda0 > 0.0) {
        // sidebands k*Omega0 folded into (-pi/h, pi/h]
        FcSeries fc = FcSeries::make(bath.lambda0, bath.nbar());
        double period = 2.0 * units::pi / h;
        std::vector<std::pair<double, int>> pos;
        for (int k = -fc.K; k <= fc.K; ++k) {
            if (fc.f_at(k) < 1e-4) continue;
            double w = std::remainder(k * bath.omega0, period);
            pos.emplace_back(w, k);
        }
        double sep = 10.0 * std::max(rate, 1e-12);
        for (std::size_t a = 0; a < pos.size(); ++a)
            for (std::size_t b = a + 1; b < pos.size(); ++b) {
                double d = std::abs(std::remainder(pos[a].first - pos[b].first, period));
                if (d < sep) {
                    warn.push_back(fmt("sidebands alias on this grid (orders %.0f and %.0f)", pos[a].second,
                                       pos[b].second));
                    a = pos.size();
                    break;
                }
            }
        double top = fc.K * bath.omega0;
        if (top * h > units::pi)
            warn.push_back(fmt("sideband order %.0f lies beyond the grid Nyquist frequency (%.4g rad/ps)", fc.K,
                               units::pi / h));
    }
    return warn;
}

double TemporalDensityMatrix::trace() const { return grid.step() * rho.diagonal().real().sum(); }

Fingerprint params_fingerprint(const PulseShape& pulse, const EmitterParams& emitter, const BathSpec& bath,
                               const TimeGrid& grid, KernelRule rule, const std::string& tag) {
    std::ostringstream os;
    os.precision(17);
    os << "vibroqfi/" << tag << "/1|" << emitter.Gamma << ',' << emitter.Gamma_perp << '|' << bath.describe() << ','
       << bath.lambda0 << ',' << bath.omega0 << ',' << bath.lambda << ',' << bath.gamma << ',' << bath.temperature
       << '|' << pulse.describe() << ',' << static_cast<int>(pulse.kind) << ',' << pulse.tsigma << ',' << pulse.t0
       << '|' << grid.tau0 << ',' << grid.tau_end << ',' << grid.n << '|' << static_cast<int>(resolve_rule(bath, rule));
    for (std::size_t i = 0; i < pulse.ts.size(); ++i) os << ';' << pulse.ts[i] << ',' << pulse.xs[i];
    if (bath.table)
        for (std::size_t i = 0; i < bath.table->omega.size(); ++i) os << ';' << bath.table->omega[i] << ',' << bath.table->J[i];
    std::string s = os.str();
    Fingerprint f{};
    SHA256(reinterpret_cast<const unsigned char*>(s.data()), s.size(), f.data());
    return f;
}

std::string to_hex(const Fingerprint& f) {
    static const char* digits = "0123456789abcdef";
    std::string s;
    for (auto b : f) {
        s += digits[b >> 4];
        s += digits[b & 15];
    }
    return s;
}

namespace detail {

namespace {

// (e^z - 1)/z and int_0^1 x e^{zx} dx
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-3) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z) {
    if (std::abs(z) < 1e-3) return 0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0;
    return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

} // namespace

CellMoments cell_moments(cplx s, double a, double b) {
    double L = b - a;
    cplx z = s * L;
    cplx e = std::exp(s * a);
    cplx p1 = phi1(z);
    return {L * e * p1, L * e * (a * p1 + L * phi2(z))};
}

std::vector<cplx> sample_pulse(const PulseShape& pulse, const TimeGrid& grid) {
    std::vector<cplx> xi(static_cast<std::size_t>(grid.n));
    for (int i = 0; i < grid.n; ++i) xi[static_cast<std::size_t>(i)] = pulse_time(pulse, grid.at(i));
    return xi;
}

void accumulate_loss(ExcitationCurve& c, double Gp, const std::vector<double>* dpe, double* dloss) {
    const double h = c.grid.step();
    const std::size_t n = c.pe.size();
    c.ploss.assign(n, 0.0);
    double acc = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        acc += 0.5 * h * (c.pe[i - 1] + c.pe[i]);
        c.ploss[i] = Gp * acc;
    }
    // exponential tail past the window, rate from the last two samples
    double rate = 0.0;
    if (n >= 2 && c.pe[n - 1] > 0.0 && c.pe[n - 2] > c.pe[n - 1]) rate = std::log(c.pe[n - 2] / c.pe[n - 1]) / h;
    double tail = rate > 0.0 ? c.pe[n - 1] / rate : 0.0;
    c.ploss_total = Gp * (acc + tail);
    if (dpe && dloss) {
        double d = 0.0;
        for (std::size_t i = 1; i < n; ++i) d += 0.5 * h * ((*dpe)[i - 1] + (*dpe)[i]);
        if (rate > 0.0) d += (*dpe)[n - 1] / rate;
        *dloss = Gp * d;
    }
}

} // namespace detail
} // namespace vibroqfi
