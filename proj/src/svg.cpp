// svg.cpp - plain SVG line chart of a sweep

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include "vibroqfi/sweep.hpp"

namespace vibroqfi {

namespace {

struct Series {
    const char* label;
    const char* color;
    const char* dash;
    std::vector<double> y;
};

// 1, 2 or 5 times a power of ten, about `want` ticks over [a, b]
double tick_step(double a, double b, int want) {
    double raw = (b - a) / want;
    if (!(raw > 0.0)) return 1.0;
    double p = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0})
        if (m * p >= raw) return m * p;
    return 10.0 * p;
}

std::string num(double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
    return b;
}

} // namespace

void write_sweep_svg(const std::string& path, const SweepConfig& cfg, const std::vector<SweepRow>& rows) {
    if (rows.empty()) throw DomainError("nothing to plot");
    const bool scaled = cfg.estimate == Parameter::Gamma;
    auto scale = [&](const SweepRow& r) { return scaled ? r.gamma * r.gamma : 1.0; };
    std::vector<double> x;
    std::vector<Series> series{{"QFI", "#1f3b73", "", {}},
                               {"QFI bound", "#1f3b73", "6,4", {}},
                               {"CFI time-resolved", "#b2452c", "", {}},
                               {"CFI frequency-resolved", "#3a8a3a", "", {}}};
    for (const auto& r : rows) {
        x.push_back(r.value);
        double s = scale(r);
        series[0].y.push_back(r.qfi * s);
        series[1].y.push_back(r.qfi_bound * s);
        series[2].y.push_back(r.cfi_time * s);
        series[3].y.push_back(r.cfi_freq * s);
    }
    double x0 = *std::min_element(x.begin(), x.end()), x1 = *std::max_element(x.begin(), x.end());
    if (x1 == x0) {
        x0 -= 0.5;
        x1 += 0.5;
    }
    double y1 = 0.0;
    for (const auto& s : series)
        for (double v : s.y)
            if (std::isfinite(v)) y1 = std::max(y1, v);
    if (y1 <= 0.0) y1 = 1.0;
    double ystep = tick_step(0.0, y1, 5);
    y1 = std::ceil(y1 / ystep * 1.0001) * ystep;

    const double W = 720, H = 460, L = 80, R = 200, T = 30, B = 60;
    const double pw = W - L - R, ph = H - T - B;
    auto px = [&](double v) { return L + (v - x0) / (x1 - x0) * pw; };
    auto py = [&](double v) { return T + ph - v / y1 * ph; };

    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot write " + path);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << pw << "\" height=\"" << ph
       << "\" fill=\"none\" stroke=\"#444\"/>\n";
    double xstep = tick_step(x0, x1, 6);
    for (double t = std::ceil(x0 / xstep) * xstep; t <= x1 + 1e-9 * xstep; t += xstep)
        os << "<line x1=\"" << px(t) << "\" x2=\"" << px(t) << "\" y1=\"" << T + ph << "\" y2=\"" << T + ph + 5
           << "\" stroke=\"#444\"/><text x=\"" << px(t) << "\" y=\"" << T + ph + 20 << "\" text-anchor=\"middle\">"
           << num(t) << "</text>\n";
    for (double t = 0.0; t <= y1 + 1e-9 * ystep; t += ystep)
        os << "<line x1=\"" << L - 5 << "\" x2=\"" << L << "\" y1=\"" << py(t) << "\" y2=\"" << py(t)
           << "\" stroke=\"#444\"/><text x=\"" << L - 8 << "\" y=\"" << py(t) + 4 << "\" text-anchor=\"end\">"
           << num(t) << "</text>\n";
    os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">" << cfg.sweep_variable
       << "</text>\n";
    os << "<text transform=\"translate(20," << T + ph / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
       << (scaled ? "Fisher information x Gamma^2" : "Fisher information") << "</text>\n";

    int li = 0;
    for (const auto& s : series) {
        std::string pts;
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::isfinite(s.y[i])) pts += num(px(x[i])) + "," + num(py(s.y[i])) + " ";
        if (pts.empty()) continue;
        os << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
        if (*s.dash) os << " stroke-dasharray=\"" << s.dash << "\"";
        os << " points=\"" << pts << "\"/>\n";
        for (std::size_t i = 0; i < x.size(); ++i)
            if (std::isfinite(s.y[i]))
                os << "<circle cx=\"" << px(x[i]) << "\" cy=\"" << py(s.y[i]) << "\" r=\"3\" fill=\"" << s.color
                   << "\"/>\n";
        double ly = T + 15 + 20 * li++;
        os << "<line x1=\"" << L + pw + 15 << "\" x2=\"" << L + pw + 45 << "\" y1=\"" << ly << "\" y2=\"" << ly
           << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"";
        if (*s.dash) os << " stroke-dasharray=\"" << s.dash << "\"";
        os << "/><text x=\"" << L + pw + 50 << "\" y=\"" << ly + 4 << "\">" << s.label << "</text>\n";
    }
    os << "</svg>\n";
    if (!os) throw std::runtime_error("cannot write " + path);
}

} // namespace vibroqfi
