// scatter.cpp - TDM builds, derivatives, excitation curves and the reference oracle

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "internal.hpp"

namespace vibroqfi {

using namespace detail;

namespace {

struct Core {
    Matrix rho, drho;
    std::vector<double> pe, dpe;
};

SingleModeInputs single_mode_inputs(const std::vector<cplx>& xi, const TimeGrid& grid, const EmitterParams& em,
                                    const BathSpec& bath) {
    SingleModeInputs in{&xi, grid, em.Gamma, em.Gamma_perp, 0.0, 0.0, 1.0};
    if (bath.kind == BathKind::SingleMode) {
        in.lambda0 = bath.lambda0;
        in.omega0 = bath.omega0;
        in.nbar = bath.nbar();
    }
    return in;
}

// rho (optional) and p_e, with d/dGamma of both when `deriv`
Core build_core(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath, const TimeGrid& grid,
                KernelRule rule, bool with_rho, bool deriv, const SidebandPlan* plan = nullptr) {
    Core c;
    auto xi = sample_pulse(pulse, grid);
    if (rule == KernelRule::CellAveraged) {
        auto in = single_mode_inputs(xi, grid, em, bath);
        SidebandPlan own;
        if (!plan) {
            own = plan_sidebands(in);
            plan = &own;
        }
        auto r = sideband_tdm(in, *plan, with_rho, deriv);
        c.rho = std::move(r.rho);
        c.drho = std::move(r.drho);
        c.pe = std::move(r.pe);
        c.dpe = std::move(r.dpe);
    } else {
        auto L = lambda1_table(bath, grid.step(), grid.n);
        if (with_rho) {
            auto r = band_tdm(xi, grid, em.Gamma, em.Gamma_perp, L, deriv);
            c.rho = std::move(r.rho);
            c.drho = std::move(r.drho);
        }
        auto q = point_quadratic_sums(xi, grid, em.Gamma, em.Gamma_perp, L, false);
        c.pe = std::move(q.pe);
        c.dpe = std::move(q.dpe);
    }
    for (double v : c.pe)
        if (!std::isfinite(v)) throw NumericalError("non-finite excitation probability");
    if (with_rho && !c.rho.allFinite()) throw NumericalError("non-finite temporal density matrix");
    return c;
}

ExcitationCurve curve_of(const TimeGrid& grid, std::vector<double> pe, double Gp, const std::vector<double>* dpe,
                         double* dloss) {
    ExcitationCurve c;
    c.grid = grid;
    c.pe = std::move(pe);
    accumulate_loss(c, Gp, dpe, dloss);
    return c;
}

void prepare(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath, const TimeGrid& grid,
             KernelRule& rule, std::vector<std::string>& diag) {
    em.validate();
    bath.validate();
    rule = resolve_rule(bath, rule);
    diag = check_grid(grid, pulse, em, bath, rule);
}

TemporalDensityMatrix assemble(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                               const TimeGrid& grid, KernelRule rule, Core& c, std::vector<std::string> diag) {
    TemporalDensityMatrix t;
    t.grid = grid;
    t.rho = std::move(c.rho);
    t.p_loss = curve_of(grid, c.pe, em.Gamma_perp, nullptr, nullptr).ploss_total;
    t.fingerprint = params_fingerprint(pulse, em, bath, grid, rule);
    t.diagnostics = std::move(diag);
    return t;
}

BathSpec with_lambda0(BathSpec b, double l0) {
    b.lambda0 = l0;
    return b;
}

double frob(const Matrix& m) { return m.norm(); }

// Richardson-extrapolated derivative in lambda0 with one fixed discretization
TdmDerivative lambda0_derivative(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                                 const TimeGrid& grid, KernelRule rule) {
    if (bath.kind != BathKind::SingleMode) throw DomainError("the Huang-Rhys factor needs a single-mode bath");
    const double l0 = bath.lambda0;
    double step = l0 > 0.0 ? std::min(0.02, 0.5 * l0) : 0.02;
    const bool central = l0 > 0.0;

    SidebandPlan plan;
    std::vector<cplx> xi;
    if (rule == KernelRule::CellAveraged) {
        xi = sample_pulse(pulse, grid);
        BathSpec top = with_lambda0(bath, l0 + step);
        plan = plan_sidebands(single_mode_inputs(xi, grid, em, top));
    }
    struct Eval {
        Matrix rho;
        double loss{0.0};
    };
    auto F = [&](double l) {
        Core c = build_core(pulse, em, with_lambda0(bath, l), grid, rule, true, false,
                            rule == KernelRule::CellAveraged ? &plan : nullptr);
        double loss = curve_of(grid, c.pe, em.Gamma_perp, nullptr, nullptr).ploss_total;
        return Eval{std::move(c.rho), loss};
    };

    TdmDerivative out;
    Eval f0;
    if (!central) {
        f0 = F(l0);
        step = std::min(step, 0.005);
    }
    auto level = [&](double s) {
        Eval hi = F(l0 + s);
        if (!central) return Eval{(hi.rho - f0.rho) / s, (hi.loss - f0.loss) / s};
        Eval lo = F(l0 - s);
        return Eval{(hi.rho - lo.rho) / (2.0 * s), (hi.loss - lo.loss) / (2.0 * s)};
    };
    // Richardson table with three columns; the step halves down each row
    const double w = central ? 4.0 : 2.0;
    const int cols = 3;
    double err = std::numeric_limits<double>::infinity();
    Eval best;
    std::vector<Eval> prev;
    for (int it = 0; it < 7; ++it, step *= 0.5) {
        std::vector<Eval> row{level(step)};
        double f = w;
        for (int c = 1; c <= std::min(it, cols - 1); ++c, f *= w)
            row.push_back(Eval{(f * row[static_cast<std::size_t>(c - 1)].rho - prev[static_cast<std::size_t>(c - 1)].rho) / (f - 1.0),
                               (f * row[static_cast<std::size_t>(c - 1)].loss - prev[static_cast<std::size_t>(c - 1)].loss) / (f - 1.0)});
        if (it >= 1) {
            const Eval& a = row.back();
            const Eval& b = prev[std::min(prev.size() - 1, row.size() - 1)];
            double e = frob(a.rho - b.rho) / std::max(frob(a.rho), 1e-300);
            if (e < err) {
                err = e;
                best = a;
            }
            if (e < 1e-7 || (it >= cols && e > 4.0 * err)) break;
        }
        prev = std::move(row);
    }
    if (!best.rho.allFinite() || !std::isfinite(best.loss)) throw NumericalError("finite-difference derivative is not finite");
    if (err > 1e-3) {
        std::ostringstream os;
        os << "lambda0 derivative: Richardson error estimate " << err << " is above 1e-3";
        throw NumericalError(os.str());
    }
    std::ostringstream os;
    os << "lambda0 derivative Richardson relative error " << err;
    out.diagnostics.push_back(os.str());
    out.drho = 0.5 * (best.rho + best.rho.adjoint());
    out.dp_loss = best.loss;
    return out;
}

} // namespace

ExcitationCurve excitation_curve(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                                 const TimeGrid& grid, KernelRule rule) {
    std::vector<std::string> diag;
    prepare(pulse, em, bath, grid, rule, diag);
    Core c = build_core(pulse, em, bath, grid, rule, false, false);
    return curve_of(grid, std::move(c.pe), em.Gamma_perp, nullptr, nullptr);
}

namespace {

TimeGrid grid_covering(const PulseShape& pulse, const EmitterParams& em, double t, int n) {
    double rate = em.Gamma + em.Gamma_perp;
    double onset = pulse.onset();
    double span = 25.0 / rate + (pulse.kind == PulseKind::Gaussian ? 12.0 * pulse.tsigma : 0.0);
    if (pulse.kind == PulseKind::Sampled && !pulse.ts.empty()) span += pulse.ts.back() - pulse.ts.front();
    if (std::isfinite(t)) span = std::max(t - onset, 12.0 / rate);
    return default_grid(pulse, n, span / 0.9);
}

} // namespace

double excitation_probability(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath, double t, int n) {
    em.validate();
    if (em.Gamma == 0.0 || t <= pulse.onset()) return 0.0;
    if (!std::isfinite(t)) return 0.0;
    TimeGrid g = grid_covering(pulse, em, t, n);
    auto c = excitation_curve(pulse, em, bath, g);
    double x = (t - g.tau0) / g.step();
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, g.n - 2);
    double f = x - i;
    return (1.0 - f) * c.pe[static_cast<std::size_t>(i)] + f * c.pe[static_cast<std::size_t>(i + 1)];
}

double loss_probability(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath, double t, int n) {
    em.validate();
    if (em.Gamma == 0.0 || em.Gamma_perp == 0.0 || t <= pulse.onset()) return 0.0;
    TimeGrid g = grid_covering(pulse, em, t, n);
    auto c = excitation_curve(pulse, em, bath, g);
    if (!std::isfinite(t)) return c.ploss_total;
    double x = (t - g.tau0) / g.step();
    int i = std::clamp(static_cast<int>(std::floor(x)), 0, g.n - 2);
    double f = x - i;
    return (1.0 - f) * c.ploss[static_cast<std::size_t>(i)] + f * c.ploss[static_cast<std::size_t>(i + 1)];
}

TemporalDensityMatrix build_tdm(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                                const TimeGrid& grid, KernelRule rule) {
    std::vector<std::string> diag;
    prepare(pulse, em, bath, grid, rule, diag);
    Core c = build_core(pulse, em, bath, grid, rule, true, false);
    return assemble(pulse, em, bath, grid, rule, c, std::move(diag));
}

std::pair<TemporalDensityMatrix, TdmDerivative> build_tdm_with_derivative(const PulseShape& pulse,
                                                                          const EmitterParams& em,
                                                                          const BathSpec& bath, const TimeGrid& grid,
                                                                          Parameter theta, KernelRule rule) {
    std::vector<std::string> diag;
    prepare(pulse, em, bath, grid, rule, diag);
    if (theta == Parameter::HuangRhys) {
        Core c = build_core(pulse, em, bath, grid, rule, true, false);
        auto t = assemble(pulse, em, bath, grid, rule, c, diag);
        auto d = lambda0_derivative(pulse, em, bath, grid, rule);
        return {std::move(t), std::move(d)};
    }
    Core c = build_core(pulse, em, bath, grid, rule, true, true);
    TdmDerivative d;
    curve_of(grid, c.pe, em.Gamma_perp, &c.dpe, &d.dp_loss);
    d.drho = std::move(c.drho);
    auto t = assemble(pulse, em, bath, grid, rule, c, std::move(diag));
    return {std::move(t), std::move(d)};
}

TdmDerivative tdm_derivative(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                             const TimeGrid& grid, Parameter theta, KernelRule rule) {
    if (theta == Parameter::HuangRhys) {
        std::vector<std::string> diag;
        prepare(pulse, em, bath, grid, rule, diag);
        return lambda0_derivative(pulse, em, bath, grid, rule);
    }
    return build_tdm_with_derivative(pulse, em, bath, grid, theta, rule).second;
}

TemporalDensityMatrix tdm_oracle(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                                 const TimeGrid& grid) {
    if (grid.n > 256) throw DomainError("the reference oracle is limited to N <= 256");
    em.validate();
    bath.validate();
    const int N = grid.n;
    const double h = grid.step();
    const double kappa = em.kappa();
    const double G = em.Gamma;
    auto xi = sample_pulse(pulse, grid);
    auto L = lambda1_table(bath, h, N);
    auto th = [](int p) { return p == 0 ? 0.5 : 1.0; };

    std::vector<cplx> S(static_cast<std::size_t>(N));
    for (int i = 0; i < N; ++i)
        for (int m = 0; m <= i; ++m)
            S[static_cast<std::size_t>(i)] +=
                h * th(i - m) * xi[static_cast<std::size_t>(m)] * std::exp(kappa * (m - i) * h + L.at(m - i));

    TemporalDensityMatrix t;
    t.grid = grid;
    t.rho.resize(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j <= i; ++j) {
            cplx D = 0.0;
            for (int m = 0; m <= i; ++m)
                for (int n = 0; n <= j; ++n) {
                    cplx e = kappa * ((m - i) + (n - j)) * h + L.at(m - i) + std::conj(L.at(n - j)) - L.at(m - j) -
                             std::conj(L.at(n - i)) + L.at(m - n) + L.at(i - j);
                    D += th(i - m) * th(j - n) * xi[static_cast<std::size_t>(m)] *
                         std::conj(xi[static_cast<std::size_t>(n)]) * std::exp(e);
                }
            D *= h * h;
            cplx xi_i = xi[static_cast<std::size_t>(i)], xi_j = xi[static_cast<std::size_t>(j)];
            cplx v = xi_i * std::conj(xi_j) - G * std::conj(xi_j) * S[static_cast<std::size_t>(i)] -
                     G * xi_i * std::conj(S[static_cast<std::size_t>(j)]) + G * G * D;
            t.rho(i, j) = v;
            t.rho(j, i) = std::conj(v);
        }
    for (int i = 0; i < N; ++i) t.rho(i, i) = t.rho(i, i).real();

    std::vector<double> pe(static_cast<std::size_t>(N));
    for (int j = 0; j < N; ++j) {
        cplx acc = 0.0;
        for (int m = 0; m <= j; ++m)
            for (int n = 0; n <= j; ++n)
                acc += th(j - m) * th(j - n) * xi[static_cast<std::size_t>(m)] * std::conj(xi[static_cast<std::size_t>(n)]) *
                       std::exp(kappa * ((m - j) + (n - j)) * h + L.at(m - n));
        pe[static_cast<std::size_t>(j)] = G * h * h * acc.real();
    }
    t.p_loss = curve_of(grid, std::move(pe), em.Gamma_perp, nullptr, nullptr).ploss_total;
    t.fingerprint = params_fingerprint(pulse, em, bath, grid, KernelRule::PointSampled, "oracle");
    return t;
}

double qfi_bound_time_domain(const PulseShape& pulse, double Gamma, const BathSpec& bath, const TimeGrid& grid,
                             KernelRule rule) {
    EmitterParams em{Gamma, 0.0};
    std::vector<std::string> diag;
    prepare(pulse, em, bath, grid, rule, diag);
    auto xi = sample_pulse(pulse, grid);
    std::vector<double> b;
    if (rule == KernelRule::CellAveraged) {
        auto in = single_mode_inputs(xi, grid, em, bath);
        SidebandPlan plan;
        plan.K = in.lambda0 == 0.0 ? 0 : truncation_order(in.lambda0, in.nbar);
        b = sideband_bound_density(in, plan);
    } else {
        auto L = lambda1_table(bath, grid.step(), grid.n);
        b = point_quadratic_sums(xi, grid, Gamma, 0.0, L, true).bound;
    }
    double s = 0.0;
    for (double v : b) s += v;
    return 4.0 * grid.step() * s;
}

} // namespace vibroqfi
