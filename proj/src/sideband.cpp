// sideband.cpp - single-mode TDM from sideband convolutions Y_q
//
// Y_q(tau) = int_{-inf}^{tau} xi(t) e^{s_q (t - tau)} dt, s_q = kappa + i q Omega0,
// with xi constant on each cell [tau_m - h/2, tau_m + h/2].
//   S   = sum_k f_k Y_k
//   p_e = Gamma sum_k f_k |Y_k|^2
//   D   = sum_l e^{i l Omega (tau - tau')} sum_mn C^l_mn Y_{m+l}(tau) Y_{n+l}(tau')^*
//   rho = xi xi^* - Gamma (S xi'^* + xi S'^*) + Gamma^2 D

#include <algorithm>
#include <cmath>
#include <map>

#include "internal.hpp"

namespace vibroqfi::detail {

namespace {

constexpr double kPrune = 1e-13;

struct Convolutions {
    int qlo{0}, qhi{0};
    std::vector<std::vector<cplx>> Y, dY; // dY = dY/ds

    const std::vector<cplx>& y(int q) const { return Y[static_cast<std::size_t>(q - qlo)]; }
    const std::vector<cplx>& dy(int q) const { return dY[static_cast<std::size_t>(q - qlo)]; }
};

void convolve(const std::vector<cplx>& xi, double h, cplx s, bool deriv, std::vector<cplx>& Y, std::vector<cplx>& dY) {
    const std::size_t n = xi.size();
    CellMoments full = cell_moments(s, -0.5 * h, 0.5 * h);
    CellMoments half = cell_moments(s, -0.5 * h, 0.0);
    cplx decay = std::exp(-s * h);
    Y.assign(n, 0.0);
    if (deriv) dY.assign(n, 0.0);
    cplx A = 0.0, dA = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        Y[j] = full.m0 * A + half.m0 * xi[j];
        if (deriv) dY[j] = full.m0 * dA + full.m1 * A + half.m1 * xi[j];
        cplx An = decay * (A + xi[j]);
        if (deriv) dA = decay * (dA - h * (A + xi[j]));
        A = An;
    }
}

Convolutions all_convolutions(const SingleModeInputs& in, int qlo, int qhi, bool deriv) {
    Convolutions c;
    c.qlo = qlo;
    c.qhi = qhi;
    c.Y.resize(static_cast<std::size_t>(qhi - qlo + 1));
    c.dY.resize(c.Y.size());
    double h = in.grid.step();
    double kappa = 0.5 * (in.Gamma + in.Gamma_perp);
    for (int q = qlo; q <= qhi; ++q) {
        std::size_t i = static_cast<std::size_t>(q - qlo);
        convolve(*in.xi, h, cplx(kappa, q * in.omega0), deriv, c.Y[i], c.dY[i]);
    }
    return c;
}

double peak(const std::vector<cplx>& v) {
    double m = 0.0;
    for (auto z : v) m = std::max(m, std::abs(z));
    return m;
}

} // namespace

SidebandPlan plan_sidebands(const SingleModeInputs& in) {
    SidebandPlan plan;
    if (in.lambda0 == 0.0) {
        plan.K = 0;
        plan.qmax = 0;
        plan.terms.push_back({0, 0, 0});
        plan.torus = 0;
        return plan;
    }
    plan.K = truncation_order(in.lambda0, in.nbar);
    CTensor C = c_tensor(in.lambda0, in.nbar, plan.K);
    plan.torus = C.P;
    const int R = C.reach();
    Convolutions conv = all_convolutions(in, -2 * R, 2 * R, false);
    std::vector<double> nu(conv.Y.size());
    for (std::size_t i = 0; i < nu.size(); ++i) nu[i] = peak(conv.Y[i]);
    double ximax = peak(*in.xi);
    double floor = kPrune * ximax * ximax / std::max(in.Gamma * in.Gamma, 1e-300);
    auto nu_at = [&](int q) { return nu[static_cast<std::size_t>(q + 2 * R)]; };
    for (int l = -R; l <= R; ++l)
        for (int m = -R; m <= R; ++m) {
            double a = nu_at(m + l);
            if (a == 0.0) continue;
            for (int n = -R; n <= R; ++n) {
                double c = C(l, m, n);
                if (c == 0.0) continue;
                if (std::abs(c) * a * nu_at(n + l) > floor) {
                    plan.terms.push_back({l, m, n});
                    plan.qmax = std::max({plan.qmax, std::abs(m + l), std::abs(n + l)});
                }
            }
        }
    plan.qmax = std::max(plan.qmax, plan.K);
    return plan;
}

SidebandResult sideband_tdm(const SingleModeInputs& in, const SidebandPlan& plan, bool with_rho, bool deriv) {
    const int N = in.grid.n;
    const double h = in.grid.step();
    const double G = in.Gamma;
    const std::vector<cplx>& xi = *in.xi;
    SidebandResult out;

    FcSeries fc = FcSeries::make(in.lambda0, in.nbar, std::max(plan.K, 1));
    Convolutions conv = all_convolutions(in, -plan.qmax, plan.qmax, deriv);

    Vector S = Vector::Zero(N), dS = Vector::Zero(N);
    out.pe.assign(static_cast<std::size_t>(N), 0.0);
    if (deriv) out.dpe.assign(static_cast<std::size_t>(N), 0.0);
    for (int k = -plan.K; k <= plan.K; ++k) {
        double f = in.lambda0 == 0.0 ? (k == 0 ? 1.0 : 0.0) : fc.f_at(k);
        if (f == 0.0) continue;
        const auto& Y = conv.y(k);
        for (int j = 0; j < N; ++j) {
            std::size_t jj = static_cast<std::size_t>(j);
            S(j) += f * Y[jj];
            out.pe[jj] += G * f * std::norm(Y[jj]);
            if (deriv) {
                const auto& dY = conv.dy(k);
                dS(j) += 0.5 * f * dY[jj];
                out.dpe[jj] += f * std::norm(Y[jj]) + G * f * std::real(std::conj(Y[jj]) * dY[jj]);
            }
        }
    }
    if (!with_rho) return out;

    // group retained terms into (l, q = m + l) columns of U and V
    CTensor C;
    if (plan.torus > 0) C = c_tensor(in.lambda0, in.nbar, plan.K, plan.torus);
    std::map<std::pair<int, int>, std::vector<std::pair<int, double>>> cols;
    for (const auto& t : plan.terms) {
        int l = t[0], m = t[1], n = t[2];
        double c = plan.torus > 0 ? C(l, m, n) : 1.0;
        if (c != 0.0) cols[{l, m + l}].emplace_back(n + l, c);
    }
    const Eigen::Index R = static_cast<Eigen::Index>(cols.size());
    Matrix U(N, deriv ? 2 * R : R), V(N, deriv ? 2 * R : R);
    Eigen::Index col = 0;
    for (const auto& [key, list] : cols) {
        int l = key.first, q = key.second;
        const auto& Yq = conv.y(q);
        for (int j = 0; j < N; ++j) {
            std::size_t jj = static_cast<std::size_t>(j);
            cplx ph = std::polar(1.0, l * in.omega0 * j * h);
            cplx v = 0.0, dv = 0.0;
            for (const auto& [p, c] : list) {
                v += c * conv.y(p)[jj];
                if (deriv) dv += c * conv.dy(p)[jj];
            }
            U(j, col) = ph * Yq[jj];
            V(j, col) = ph * v;
            if (deriv) {
                // d(U V^+) = dU V^+ + U dV^+, packed as [dU U][V dV]^+
                U(j, R + col) = U(j, col);
                U(j, col) = ph * 0.5 * conv.dy(q)[jj];
                V(j, R + col) = ph * 0.5 * dv;
            }
        }
        ++col;
    }

    Eigen::Map<const Vector> x(xi.data(), N);
    out.rho = x * x.adjoint() - G * (S * x.adjoint() + x * S.adjoint());
    if (deriv) {
        Matrix D = U.rightCols(R) * V.leftCols(R).adjoint();
        out.drho = -(S * x.adjoint() + x * S.adjoint()) - G * (dS * x.adjoint() + x * dS.adjoint()) + 2.0 * G * D;
        out.drho.noalias() += (G * G) * (U * V.adjoint());
        out.rho += (G * G) * D;
        out.drho = 0.5 * (out.drho + out.drho.adjoint()).eval();
    } else {
        out.rho.noalias() += (G * G) * (U * V.adjoint());
    }
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
    return out;
}

std::vector<double> sideband_bound_density(const SingleModeInputs& in, const SidebandPlan& plan) {
    const int N = in.grid.n;
    FcSeries fc = FcSeries::make(in.lambda0, in.nbar, std::max(plan.K, 1));
    Convolutions conv = all_convolutions(in, -plan.K, plan.K, true);
    std::vector<double> b(static_cast<std::size_t>(N), 0.0);
    for (int k = -plan.K; k <= plan.K; ++k) {
        double f = in.lambda0 == 0.0 ? (k == 0 ? 1.0 : 0.0) : fc.f_at(k);
        if (f == 0.0) continue;
        for (std::size_t j = 0; j < b.size(); ++j)
            b[j] += f * std::norm(conv.y(k)[j] + 0.5 * in.Gamma * conv.dy(k)[j]);
    }
    return b;
}

} // namespace vibroqfi::detail
