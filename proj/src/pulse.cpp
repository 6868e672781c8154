#include "vibroqfi/pulse.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "vibroqfi/units.hpp"

namespace vibroqfi {

using units::pi;

namespace {

const double inv_sqrt_2pi = 1.0 / std::sqrt(2.0 * pi);

// (e^z - 1)/z and int_0^1 s e^{zs} ds
cplx phi1(cplx z) {
    if (std::abs(z) < 1e-2) return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0;
    return (std::exp(z) - 1.0) / z;
}

cplx phi2(cplx z) {
    if (std::abs(z) < 1e-2) return 0.5 + z / 3.0 + z * z / 8.0 + z * z * z / 30.0;
    return (std::exp(z) * (z - 1.0) + 1.0) / (z * z);
}

double segment_norm2(cplx a, cplx b, double dt) {
    return dt / 3.0 * (std::norm(a) + std::real(std::conj(a) * b) + std::norm(b));
}

} // namespace

PulseShape PulseShape::exponential(double tsigma) {
    if (!(tsigma > 0.0)) throw DomainError("pulse duration must be > 0");
    PulseShape p;
    p.kind = PulseKind::DecayingExponential;
    p.tsigma = tsigma;
    return p;
}

PulseShape PulseShape::gaussian(double tsigma, double t0) {
    if (!(tsigma > 0.0)) throw DomainError("pulse duration must be > 0");
    PulseShape p;
    p.kind = PulseKind::Gaussian;
    p.tsigma = tsigma;
    p.t0 = t0;
    return p;
}

PulseShape PulseShape::sampled(std::vector<double> ts, std::vector<cplx> xs, bool normalize) {
    if (ts.size() < 2 || ts.size() != xs.size()) throw DomainError("sampled pulse needs matching t and xi columns");
    for (std::size_t i = 1; i < ts.size(); ++i)
        if (!(ts[i] > ts[i - 1])) throw DomainError("sampled pulse times must increase");
    PulseShape p;
    p.kind = PulseKind::Sampled;
    p.ts = std::move(ts);
    p.xs = std::move(xs);
    double n2 = p.norm2();
    if (!(n2 > 0.0)) throw DomainError("sampled pulse has zero norm");
    if (normalize) {
        double s = 1.0 / std::sqrt(n2);
        for (auto& x : p.xs) x *= s;
    }
    // duration as the standard deviation of |xi|^2 (on a fine resampling)
    double m0 = 0.0, m1 = 0.0, m2 = 0.0;
    for (std::size_t i = 0; i + 1 < p.ts.size(); ++i) {
        const int sub = 16;
        double dt = (p.ts[i + 1] - p.ts[i]) / sub;
        for (int k = 0; k < sub; ++k) {
            double t = p.ts[i] + (k + 0.5) * dt;
            double w = std::norm(pulse_time(p, t)) * dt;
            m0 += w;
            m1 += w * t;
            m2 += w * t * t;
        }
    }
    double mean = m1 / m0;
    p.tsigma = std::sqrt(std::max(m2 / m0 - mean * mean, 0.0));
    p.t0 = mean;
    return p;
}

double PulseShape::onset() const {
    switch (kind) {
    case PulseKind::DecayingExponential: return 0.0;
    case PulseKind::Gaussian: return t0 - 6.0 * tsigma;
    case PulseKind::Sampled: return ts.front();
    }
    return 0.0;
}

double PulseShape::norm2() const {
    if (kind != PulseKind::Sampled) return 1.0;
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < ts.size(); ++i) s += segment_norm2(xs[i], xs[i + 1], ts[i + 1] - ts[i]);
    return s;
}

std::string PulseShape::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case PulseKind::DecayingExponential: os << "exponential tsigma=" << tsigma; break;
    case PulseKind::Gaussian: os << "gaussian tsigma=" << tsigma << " t0=" << t0; break;
    case PulseKind::Sampled:
        os << "sampled n=" << ts.size();
        for (std::size_t i = 0; i < ts.size(); ++i) os << ' ' << ts[i] << ':' << xs[i].real() << ':' << xs[i].imag();
        break;
    }
    return os.str();
}

PulseShape load_sampled_pulse(const std::string& path, bool normalize) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open pulse file: " + path);
    std::vector<double> ts;
    std::vector<cplx> xs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double t, re, im = 0.0;
        if (!(ss >> t)) continue;
        if (!(ss >> re)) throw DomainError(path + ":" + std::to_string(lineno) + ": expected t and Re xi");
        ss >> im;
        ts.push_back(t);
        xs.emplace_back(re, im);
    }
    return PulseShape::sampled(std::move(ts), std::move(xs), normalize);
}

cplx pulse_time(const PulseShape& p, double t) {
    switch (p.kind) {
    case PulseKind::DecayingExponential:
        if (t < 0.0) return 0.0;
        return std::exp(-t / (2.0 * p.tsigma)) / std::sqrt(p.tsigma);
    case PulseKind::Gaussian: {
        double u = t - p.t0;
        return std::pow(2.0 * pi * p.tsigma * p.tsigma, -0.25) * std::exp(-u * u / (4.0 * p.tsigma * p.tsigma));
    }
    case PulseKind::Sampled: {
        if (t < p.ts.front() || t > p.ts.back()) return 0.0;
        auto it = std::upper_bound(p.ts.begin(), p.ts.end(), t);
        std::size_t i = static_cast<std::size_t>(it - p.ts.begin());
        if (i >= p.ts.size()) return p.xs.back();
        double s = (t - p.ts[i - 1]) / (p.ts[i] - p.ts[i - 1]);
        return p.xs[i - 1] + (p.xs[i] - p.xs[i - 1]) * s;
    }
    }
    return 0.0;
}

cplx pulse_freq(const PulseShape& p, double w) {
    switch (p.kind) {
    case PulseKind::DecayingExponential:
        return inv_sqrt_2pi / (std::sqrt(p.tsigma) * cplx(1.0 / (2.0 * p.tsigma), w));
    case PulseKind::Gaussian:
        return std::pow(2.0 * p.tsigma * p.tsigma / pi, 0.25) * std::exp(-w * w * p.tsigma * p.tsigma) *
               std::exp(cplx(0.0, -w * p.t0));
    case PulseKind::Sampled: {
        // exact transform of the piecewise-linear interpolant
        cplx acc = 0.0;
        for (std::size_t i = 0; i + 1 < p.ts.size(); ++i) {
            double dt = p.ts[i + 1] - p.ts[i];
            cplx z(0.0, -w * dt);
            cplx seg = p.xs[i] * phi1(z) + (p.xs[i + 1] - p.xs[i]) * phi2(z);
            acc += std::exp(cplx(0.0, -w * p.ts[i])) * dt * seg;
        }
        return inv_sqrt_2pi * acc;
    }
    }
    return 0.0;
}

} // namespace vibroqfi
