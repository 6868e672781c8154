// fisher.cpp - SLD quantum Fisher information, diagonal-measurement CFIs, bounds

#include "vibroqfi/fisher.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <lapacke.h>

namespace vibroqfi {

namespace {

constexpr double kFloor = 1e-14;

struct Eig {
    Eigen::VectorXd p;
    Matrix V;
};

Eig hermitian_eig(const Matrix& a) {
    const int n = static_cast<int>(a.rows());
    Eig e;
    e.V = a;
    e.p.resize(n);
    lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'V', 'L', n,
                                     reinterpret_cast<lapack_complex_double*>(e.V.data()), n, e.p.data());
    if (info != 0) throw NumericalError("Hermitian eigensolver failed, info " + std::to_string(info));
    return e;
}

void check_pair(const Matrix& rho, const Matrix& drho) {
    if (rho.rows() != rho.cols() || drho.rows() != rho.rows() || drho.cols() != rho.cols())
        throw DomainError("qfi: matrices must be square and of equal size");
    if (rho.size() == 0) throw DomainError("qfi: empty matrix");
    auto herm = [](const Matrix& m) {
        double scale = m.cwiseAbs().maxCoeff();
        return (m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * std::max(scale, 1e-300);
    };
    if (!herm(rho)) throw DomainError("qfi: density matrix is not Hermitian");
    if (!herm(drho)) throw DomainError("qfi: derivative is not Hermitian");
}

// Rows i with p_i > cut/2 of V^+ drho V, enough for every pair above cut.
struct Spectral {
    std::vector<double> p; // clipped at zero
    std::vector<int> rows;
    Matrix Mt; // Mt(j, r) = <j| drho |rows[r]>
    double trace{0.0};
    QfiDetail detail;
};

Spectral spectral(const Matrix& rho, const Matrix& drho, double eps_min) {
    check_pair(rho, drho);
    if (!(eps_min > 0.0)) throw DomainError("qfi: eps_rank must be positive");
    Eig e = hermitian_eig(0.5 * (rho + rho.adjoint()));
    const int n = static_cast<int>(rho.rows());
    Spectral s;
    s.p.resize(static_cast<std::size_t>(n));
    double pmax = e.p.maxCoeff();
    for (int i = 0; i < n; ++i) {
        s.p[static_cast<std::size_t>(i)] = std::max(e.p(i), 0.0);
        s.trace += e.p(i);
    }
    if (!(s.trace > 0.0)) throw DomainError("qfi: density matrix has no weight");
    double cut = 0.5 * eps_min * s.trace;
    double dropped = 0.0;
    for (int i = 0; i < n; ++i) {
        if (e.p(i) > cut)
            s.rows.push_back(i);
        else
            dropped += s.p[static_cast<std::size_t>(i)];
    }
    Matrix VR(n, static_cast<Eigen::Index>(s.rows.size()));
    for (std::size_t r = 0; r < s.rows.size(); ++r) VR.col(static_cast<Eigen::Index>(r)) = e.V.col(s.rows[r]);
    Matrix W = drho * VR;
    s.Mt.noalias() = e.V.adjoint() * W;
    s.detail.dim = n;
    s.detail.min_eigenvalue = e.p.minCoeff() / pmax;
    s.detail.discarded = dropped / s.trace;
    return s;
}

double sum_at(const Spectral& s, double eps) {
    const double cut = eps * s.trace;
    const int n = static_cast<int>(s.p.size());
    std::vector<char> in_rows(static_cast<std::size_t>(n), 0);
    for (int i : s.rows) in_rows[static_cast<std::size_t>(i)] = 1;
    double q = 0.0;
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
        const double pi = s.p[static_cast<std::size_t>(s.rows[r])];
        if (pi <= 0.5 * cut) continue;
        for (int j = 0; j < n; ++j) {
            const double pj = s.p[static_cast<std::size_t>(j)];
            const double den = pi + pj;
            if (den <= cut) continue;
            // pairs with j outside the row set appear once here, stand for (i,j) and (j,i)
            bool j_row = in_rows[static_cast<std::size_t>(j)] && pj > 0.5 * cut;
            q += (j_row ? 2.0 : 4.0) * std::norm(s.Mt(j, static_cast<Eigen::Index>(r))) / den;
        }
    }
    return q;
}

int kept_at(const Spectral& s, double eps) {
    int k = 0;
    for (int i : s.rows)
        if (s.p[static_cast<std::size_t>(i)] > 0.5 * eps * s.trace) ++k;
    return k;
}

double g_kernel(double w, double G) {
    double d = G * G + 4.0 * w * w;
    return 64.0 * w * w / (d * d);
}

// int g(w + shift) |xi~(w)|^2 dw, split at the kernel and pulse features
double shifted_integral(const PulseShape& pulse, double G, double shift) {
    auto f = [&](double w) { return g_kernel(w + shift, G) * std::norm(pulse_freq(pulse, w)); };
    double width = 1.0 / pulse.tsigma;
    std::vector<double> knots{-shift - 4.0 * G, -shift - 0.5 * G, -shift, -shift + 0.5 * G, -shift + 4.0 * G,
                              -8.0 * width, -width, 0.0, width, 8.0 * width};
    std::sort(knots.begin(), knots.end());
    knots.erase(std::unique(knots.begin(), knots.end()), knots.end());
    using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
    const double inf = std::numeric_limits<double>::infinity();
    double total = GK::integrate(f, -inf, knots.front(), 15, 1e-12);
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) total += GK::integrate(f, knots[i], knots[i + 1], 15, 1e-12);
    total += GK::integrate(f, knots.back(), inf, 15, 1e-12);
    return total;
}

} // namespace

QfiDetail qfi_detail(const Matrix& rho, const Matrix& drho, double eps_rank) {
    Spectral s = spectral(rho, drho, eps_rank);
    QfiDetail d = s.detail;
    d.value = sum_at(s, eps_rank);
    d.kept = kept_at(s, eps_rank);
    return d;
}

double qfi(const Matrix& rho, const Matrix& drho, double eps_rank) { return qfi_detail(rho, drho, eps_rank).value; }

std::vector<double> qfi_scan(const Matrix& rho, const Matrix& drho, const std::vector<double>& eps_ranks) {
    if (eps_ranks.empty()) return {};
    Spectral s = spectral(rho, drho, *std::min_element(eps_ranks.begin(), eps_ranks.end()));
    std::vector<double> out;
    for (double e : eps_ranks) out.push_back(sum_at(s, e));
    return out;
}

double loss_term(double p_loss, double dp_loss) {
    if (p_loss < 0.0) throw DomainError("negative loss probability");
    if (p_loss == 0.0) {
        if (dp_loss != 0.0) throw DomainError("loss probability is zero but its derivative is not");
        return 0.0;
    }
    return dp_loss * dp_loss / p_loss;
}

double qfi_lossy_total(const TemporalDensityMatrix& tdm, const TdmDerivative& d, double eps_rank) {
    const double h = tdm.grid.step();
    return loss_term(tdm.p_loss, d.dp_loss) + qfi(h * tdm.rho, h * d.drho, eps_rank);
}

namespace {

double diagonal_cfi(const Eigen::VectorXd& p, const Eigen::VectorXd& dp, double measure) {
    const double floor = kFloor * p.maxCoeff();
    double s = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i)
        if (p(i) > floor) s += dp(i) * dp(i) / p(i);
    return measure * s;
}

} // namespace

double cfi_time(const TemporalDensityMatrix& tdm, const TdmDerivative& d) {
    return loss_term(tdm.p_loss, d.dp_loss) +
           diagonal_cfi(tdm.rho.diagonal().real(), d.drho.diagonal().real(), tdm.grid.step());
}

double cfi_frequency(const SpectralDensityMatrix& sdm, const Matrix& dS, double dp_loss) {
    return loss_term(sdm.p_loss, dp_loss) + diagonal_cfi(sdm.S.diagonal().real(), dS.diagonal().real(), sdm.domega);
}

double q_no_vibration(const PulseShape& pulse, double Gamma) {
    if (!(Gamma > 0.0)) throw DomainError("Gamma must be positive");
    return shifted_integral(pulse, Gamma, 0.0);
}

double qfi_bound_single_mode(const PulseShape& pulse, double Gamma, double lambda0, double nbar, double omega0,
                             int K) {
    if (!(Gamma > 0.0)) throw DomainError("Gamma must be positive");
    if (lambda0 < 0.0 || nbar < 1.0) throw DomainError("bad Franck-Condon parameters");
    if (lambda0 == 0.0) return q_no_vibration(pulse, Gamma);
    FcSeries fc = FcSeries::make(lambda0, nbar, K);
    for (;;) {
        double sum = 0.0;
        for (int k = -fc.K; k <= fc.K; ++k) sum += fc.f_at(k);
        if (std::abs(1.0 - sum) <= 1e-10) break;
        if (fc.K > 4096) throw NumericalError("Franck-Condon series does not converge");
        fc = FcSeries::make(lambda0, nbar, 2 * fc.K);
    }
    double q = 0.0;
    for (int k = -fc.K; k <= fc.K; ++k) {
        double f = fc.f_at(k);
        if (f < 1e-18) continue;
        q += f * shifted_integral(pulse, Gamma, k * omega0);
    }
    return q;
}

double qfi_bound_general(const PulseShape& pulse, double Gamma, const BathSpec& bath, const TimeGrid& grid) {
    return qfi_bound_time_domain(pulse, Gamma, bath, grid);
}

double qfi_bound_general(const PulseShape& pulse, double Gamma, const BathSpec& bath) {
    if (!(Gamma > 0.0)) throw DomainError("Gamma must be positive");
    double extent = pulse.kind == PulseKind::Gaussian ? 12.0 * pulse.tsigma : 20.0 * pulse.tsigma;
    if (pulse.kind == PulseKind::Sampled && !pulse.ts.empty()) extent = pulse.ts.back() - pulse.ts.front();
    double window = extent + 30.0 / Gamma;
    double h = std::min(0.05 / Gamma, pulse.kind == PulseKind::Sampled ? 1e300 : 0.05 * pulse.tsigma);
    if (resolve_rule(bath, KernelRule::Auto) == KernelRule::PointSampled && bath.frequency_scale() > 0.0)
        h = std::min(h, 0.05 / bath.frequency_scale());
    int n = 1024;
    while (n < 16384 && window / (n - 1) > h) n *= 2;
    return qfi_bound_time_domain(pulse, Gamma, bath, default_grid(pulse, n, window));
}

double applicable_bound(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath, const TimeGrid& grid,
                        Parameter theta) {
    if (theta != Parameter::Gamma || em.Gamma_perp != 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (bath.kind == BathKind::None) return q_no_vibration(pulse, em.Gamma);
    if (bath.kind == BathKind::SingleMode)
        return qfi_bound_single_mode(pulse, em.Gamma, bath.lambda0, bath.nbar(), bath.omega0);
    return qfi_bound_general(pulse, em.Gamma, bath, grid);
}

FisherReport fisher_report(const TemporalDensityMatrix& tdm, const TdmDerivative& d, Parameter theta,
                           double qfi_bound, double eps_rank) {
    FisherReport r;
    r.parameter = theta;
    r.grid = tdm.grid;
    r.p_loss = tdm.p_loss;
    r.qfi_bound = qfi_bound;
    r.diagnostics = tdm.diagnostics;
    r.diagnostics.insert(r.diagnostics.end(), d.diagnostics.begin(), d.diagnostics.end());
    r.loss_term = loss_term(tdm.p_loss, d.dp_loss);

    const double h = tdm.grid.step();
    Spectral s = spectral(h * tdm.rho, h * d.drho, eps_rank / 100.0);
    r.detail = s.detail;
    r.detail.value = sum_at(s, eps_rank);
    r.detail.kept = kept_at(s, eps_rank);
    double fine = sum_at(s, eps_rank / 100.0);
    r.rank_sensitivity = r.detail.value > 0.0 ? std::abs(fine - r.detail.value) / r.detail.value : 0.0;
    r.qfi = r.loss_term + r.detail.value;

    r.cfi_time = cfi_time(tdm, d);
    SpectralDensityMatrix sdm = tdm_to_sdm(tdm);
    r.cfi_frequency = cfi_frequency(sdm, to_frequency(d.drho, tdm.grid), d.dp_loss);

    const double slack = 1.0 + 1e-6;
    if (r.cfi_time > r.qfi * slack) r.diagnostics.push_back("cfi_time exceeds qfi");
    if (r.cfi_frequency > r.qfi * slack) r.diagnostics.push_back("cfi_frequency exceeds qfi");
    if (std::isfinite(r.qfi_bound) && r.qfi > r.qfi_bound * slack) r.diagnostics.push_back("qfi exceeds qfi_bound");
    if (r.detail.min_eigenvalue < -1e-8) r.diagnostics.push_back("density matrix has negative eigenvalues");
    if (r.rank_sensitivity > 1e-3) r.diagnostics.push_back("qfi depends on the eigenvalue cutoff");
    return r;
}

FisherReport fisher_report(const PulseShape& pulse, const EmitterParams& em, const BathSpec& bath,
                           const TimeGrid& grid, Parameter theta, const FisherOptions& opt) {
    auto [tdm, d] = build_tdm_with_derivative(pulse, em, bath, grid, theta, opt.rule);
    double bound = opt.with_bound ? applicable_bound(pulse, em, bath, grid, theta)
                                  : std::numeric_limits<double>::quiet_NaN();
    return fisher_report(tdm, d, theta, bound, opt.eps_rank);
}

} // namespace vibroqfi
