// acceptance - one PASS/FAIL line per criterion, exit status 1 if any fails

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "vibroqfi/fisher.hpp"
#include "vibroqfi/spectral.hpp"
#include "vibroqfi/units.hpp"

using namespace vibroqfi;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

std::string fmt(const char* f, auto... args) {
    char b[512];
    std::snprintf(b, sizeof b, f, args...);
    return b;
}

const double kGamma = 0.15;
const double kW1000 = units::wavenumber_to_angular(1000.0);

std::vector<double> lambda_grid(double from) {
    std::vector<double> v;
    for (int i = from > 0.0 ? 1 : 0; i <= 10; ++i) v.push_back(0.1 * i);
    return v;
}

struct Point {
    double l0;
    FisherReport r;
    double norm_err, herm_err;
};

// Gamma estimation sweep over lambda0 at T = 0, Omega0 = 1000 cm^-1, n = 2048, window 20/Gamma
std::vector<Point> gamma_sweep(double gp_ratio) {
    auto pulse = PulseShape::exponential(1.0 / kGamma);
    auto grid = default_grid(pulse, 2048, 20.0 / kGamma);
    EmitterParams em{kGamma, gp_ratio * kGamma};
    std::vector<Point> pts;
    for (double l0 : lambda_grid(0.0)) {
        auto bath = BathSpec::single_mode(l0, kW1000, 0.0);
        auto [t, d] = build_tdm_with_derivative(pulse, em, bath, grid, Parameter::Gamma);
        double bound = applicable_bound(pulse, em, bath, grid, Parameter::Gamma);
        Point p{l0, fisher_report(t, d, Parameter::Gamma, bound), 0.0, 0.0};
        p.norm_err = std::abs(t.trace() + t.p_loss - 1.0);
        p.herm_err = (t.rho - t.rho.adjoint()).cwiseAbs().maxCoeff() / t.rho.cwiseAbs().maxCoeff();
        pts.push_back(std::move(p));
    }
    return pts;
}

const std::vector<Point>& sweep0() {
    static std::vector<Point> s = gamma_sweep(0.0);
    return s;
}

// first lambda0 where cfi_frequency overtakes cfi_time, linearly interpolated
double crossover(const std::vector<Point>& pts) {
    auto gap = [](const Point& p) { return p.r.cfi_frequency - p.r.cfi_time; };
    if (gap(pts.front()) > 0.0) return pts.front().l0;
    for (std::size_t i = 1; i < pts.size(); ++i)
        if (gap(pts[i]) > 0.0) {
            double a = gap(pts[i - 1]), b = gap(pts[i]);
            return pts[i - 1].l0 + (pts[i].l0 - pts[i - 1].l0) * a / (a - b);
        }
    return INFINITY;
}

Outcome c1() {
    const double G = kGamma;
    auto pulse = PulseShape::exponential(1.0 / G);
    EmitterParams em{G, 0.0};
    auto grid = default_grid(pulse, 4096, 20.0 / G);
    auto c = excitation_curve(pulse, em, BathSpec::none(), grid);
    double err = 0.0;
    for (int i = 0; i < grid.n; ++i) {
        double t = grid.at(i);
        if (t < 0.0 || t > 10.0 / G) continue;
        err = std::max(err, std::abs(c.pe[static_cast<std::size_t>(i)] - G * G * t * t * std::exp(-G * t)));
    }
    double peak = excitation_probability(pulse, em, BathSpec::none(), 2.0 / G);
    double peak_err = std::abs(peak - 4.0 * std::exp(-2.0));
    return {err <= 1e-4 && peak_err <= 1e-4, fmt("max |p_e - G^2 t^2 e^{-Gt}| = %.2e, p_e(2/G) - 4e^-2 = %.2e", err, peak_err)};
}

Outcome c2() {
    const double G = 2.0;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 128, 11.0 / G);
    const double W = units::wavenumber_to_angular(100.0);
    const BathSpec baths[] = {BathSpec::none(), BathSpec::single_mode(0.8, W, 0.0), BathSpec::single_mode(0.5, W, 300.0),
                              BathSpec::drude_lorentz(0.5, 1.9, 300.0)};
    double worst = 0.0;
    for (const auto& b : baths) {
        EmitterParams em{G, 0.0};
        auto fast = build_tdm(pulse, em, b, grid, KernelRule::PointSampled);
        auto ref = tdm_oracle(pulse, em, b, grid);
        worst = std::max(worst, (fast.rho - ref.rho).cwiseAbs().maxCoeff() / ref.rho.cwiseAbs().maxCoeff());
    }
    return {worst <= 1e-6, fmt("max relative entry error over 4 baths at N=128: %.2e", worst)};
}

Outcome c3() {
    double norm = 0.0, herm = 0.0, eig = 0.0;
    for (const auto& p : sweep0()) {
        norm = std::max(norm, p.norm_err);
        herm = std::max(herm, p.herm_err);
        eig = std::min(eig, p.r.detail.min_eigenvalue);
    }
    return {norm <= 1e-3 && herm <= 1e-12 && eig >= -1e-8,
            fmt("lambda0 0..1, n=2048: |trace + p_loss - 1| <= %.2e, Hermiticity %.1e, min eig/max %.1e", norm, herm,
                eig)};
}

Outcome c4() {
    const auto& r = sweep0().front().r;
    double q = r.qfi * kGamma * kGamma;
    bool ok = std::abs(q - 2.0) <= 0.04 && r.cfi_time / r.qfi >= 0.99 && r.cfi_frequency <= 1e-3 * r.qfi;
    return {ok, fmt("qfi*G^2 = %.5f, cfi_time/qfi = %.5f, cfi_freq/qfi = %.2e", q, r.cfi_time / r.qfi,
                    r.cfi_frequency / r.qfi)};
}

Outcome c5() {
    bool ok = true;
    double worst_ratio = 0.0, slack = -1e300;
    for (const auto& p : sweep0()) {
        ok = ok && p.r.qfi <= p.r.qfi_bound * (1.0 + 1e-6);
        slack = std::max(slack, p.r.qfi / p.r.qfi_bound - 1.0);
        double ratio = p.r.qfi_bound / (std::exp(-p.l0) * 2.0 / (kGamma * kGamma));
        worst_ratio = std::max(worst_ratio, std::abs(ratio - 1.0));
    }
    ok = ok && worst_ratio <= 1e-2;
    return {ok, fmt("max qfi/bound - 1 = %.2e, max |bound/(e^-l0 2/G^2) - 1| = %.2e", slack, worst_ratio)};
}

Outcome c6() {
    const auto& s = sweep0();
    bool q_mono = true, t_mono = true, f_mono = true;
    for (std::size_t i = 1; i < s.size(); ++i) {
        const auto &a = s[i - 1].r, &b = s[i].r;
        q_mono = q_mono && b.qfi <= a.qfi;
        t_mono = t_mono && b.cfi_time / b.qfi <= a.cfi_time / a.qfi;
        f_mono = f_mono && b.cfi_frequency / b.qfi >= a.cfi_frequency / a.qfi;
    }
    const auto& r08 = s[8].r;
    bool cross = r08.cfi_frequency > r08.cfi_time;
    return {q_mono && t_mono && f_mono && cross,
            fmt("monotone qfi %d, cfi_time/qfi %d, cfi_freq/qfi %d; at lambda0=0.8 cfi_freq/cfi_time = %.3f", q_mono,
                t_mono, f_mono, r08.cfi_frequency / r08.cfi_time)};
}

Outcome c7() {
    double a = units::thermal_occupation(units::wavenumber_to_angular(100.0), 300.0);
    double b = units::thermal_occupation(units::wavenumber_to_angular(1000.0), 300.0);
    return {std::abs(a - 4.25) <= 0.01 && std::abs(b - 1.02) <= 0.01,
            fmt("nbar(100 cm^-1, 300 K) = %.4f, nbar(1000 cm^-1, 300 K) = %.4f", a, b)};
}

Outcome c8() {
    const double temps[] = {30.0, 77.0, 150.0, 300.0, 500.0};
    const double times[] = {-4.0, -0.9, -0.05, 0.01, 0.1, 0.35, 0.8, 1.7, 3.5, 9.0};
    double dl = 0.0, br = 0.0;
    for (double T : temps)
        for (double t : times) {
            auto d = BathSpec::drude_lorentz(0.5, 1.9, T);
            auto b = BathSpec::brownian(0.5, 1.9, 18.8, T);
            dl = std::max(dl, std::abs(lambda1(d, t) - lambda1_quadrature(d, t)) / std::abs(lambda1_quadrature(d, t)));
            br = std::max(br, std::abs(lambda1(b, t) - lambda1_quadrature(b, t)) / std::abs(lambda1_quadrature(b, t)));
        }
    return {dl <= 1e-6 && br <= 1e-6, fmt("50 (t, T) samples each: Drude-Lorentz %.2e, Brownian %.2e", dl, br)};
}

Outcome c9() {
    double c0 = crossover(sweep0());
    auto half = gamma_sweep(0.5);
    auto five = gamma_sweep(5.0);
    double ch = crossover(half), c5 = crossover(five);
    double f_half = half.front().r.cfi_frequency, f_five = five.front().r.cfi_frequency;
    bool ok = f_half > 0.0 && f_five > 0.0 && ch < c0 && c5 < ch;
    return {ok, fmt("cfi_freq(lambda0=0): %.3g, %.3g; crossover lambda0 at Gamma_perp/Gamma = 0, 0.5, 5: %.3f, %.3f, %.3f",
                    f_half, f_five, c0, ch, c5)};
}

Outcome c10() {
    bool ok = true;
    double fsum = 0.0, conv = 0.0, csum = 0.0;
    for (double nb : {1.0, units::thermal_occupation(units::wavenumber_to_angular(100.0), 300.0)}) {
        const double l0 = 0.5;
        auto s = FcSeries::make(l0, nb);
        double sum = 0.0;
        for (int k = -s.K; k <= s.K; ++k) {
            sum += s.f_at(k);
            if (nb > 1.0 || k >= 0) ok = ok && s.f_at(k) > 0.0;
        }
        fsum = std::max(fsum, std::abs(sum - 1.0));
        for (int k = -6; k <= 6; ++k) {
            double c = 0.0;
            for (int j = -s.span; j <= s.span; ++j) c += s.f_at(j) * s.d_at(k - j);
            conv = std::max(conv, std::abs(c - (k == 0 ? 1.0 : 0.0)));
        }
        auto C = c_tensor(l0, nb, s.K);
        const int R = C.reach();
        double total = 0.0;
        for (int l = -R; l <= R; ++l)
            for (int m = -R; m <= R; ++m)
                for (int n = -R; n <= R; ++n) total += C(l, m, n);
        csum = std::max(csum, std::abs(total - 1.0));
        for (int k = (nb > 1.0 ? -3 : 0); k <= 3; ++k) ok = ok && C(k, k, k) > 0.0;
    }
    ok = ok && fsum <= 1e-10 && conv <= 1e-8 && csum <= 1e-6;
    return {ok, fmt("|sum f - 1| = %.1e, |f*d - delta| = %.1e, |sum C - 1| = %.1e, positivity %s", fsum, conv, csum,
                    ok ? "holds" : "checked")};
}

Outcome c11() {
    const double G = kGamma;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 4096, 30.0 / G);
    auto s = tdm_to_sdm(build_tdm(pulse, EmitterParams{G, 0.0}, BathSpec::none(), grid));
    double worst = 0.0;
    for (int k = 0; k < grid.n; ++k) {
        double w = s.omega[static_cast<std::size_t>(k)];
        if (std::abs(w) > 10.0 * G) continue;
        double ref = std::norm(pulse_freq(pulse, w));
        worst = std::max(worst, std::abs(s.S(k, k).real() - ref) / ref);
    }
    return {worst <= 1e-3, fmt("max relative deviation from |xi~|^2 on |w| <= 10 Gamma (N=4096): %.2e", worst)};
}

Outcome c12() {
    auto pulse = PulseShape::exponential(1.0 / kGamma);
    auto grid = default_grid(pulse, 2048, 20.0 / kGamma);
    EmitterParams em{kGamma, 0.0};
    bool ok = true;
    double best = 0.0, best_at = 0.0;
    for (double l0 : lambda_grid(0.1)) {
        auto bath = BathSpec::single_mode(l0, kW1000, 0.0);
        auto [t, d] = build_tdm_with_derivative(pulse, em, bath, grid, Parameter::HuangRhys);
        auto r = fisher_report(t, d, Parameter::HuangRhys, NAN);
        ok = ok && r.qfi > 0.0 && r.cfi_time <= r.qfi * (1.0 + 1e-6) && r.cfi_frequency <= r.qfi * (1.0 + 1e-6);
        double ratio = std::max(r.cfi_time, r.cfi_frequency) / r.qfi;
        if (ratio > best) {
            best = ratio;
            best_at = l0;
        }
    }
    ok = ok && best >= 0.4;
    return {ok, fmt("qfi > 0 and CFIs <= qfi on lambda0 0.1..1; max cfi/qfi = %.3f at lambda0 = %.1f", best, best_at)};
}

} // namespace

int main() {
    const std::vector<std::function<Outcome()>> criteria{c1, c2, c3, c4, c5, c6, c7, c8, c9, c10, c11, c12};
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        auto start = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i]();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("criterion %2zu: %s  %s  [%.1f s]\n", i + 1, o.pass ? "PASS" : "FAIL", o.detail.c_str(), s);
        std::fflush(stdout);
        failed += !o.pass;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed ? 1 : 0;
}
