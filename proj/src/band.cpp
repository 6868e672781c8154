// band.cpp - point-sampled TDM for an arbitrary Lambda_1 table
//
// For each band delta = i - j >= 0 the double sum
//   D_{j+delta, j} = sum_{p,q} K_delta(p, q) xi_{j+delta-p} xi_{j-q}^*
// is a 2D linear convolution; it is done with one M x M FFT (M = 2N), and the
// needed anti-diagonal is pulled out of the product in O(M^2) plus a 1D FFT.

#include <algorithm>
#include <cmath>

#include "fft.hpp"
#include "internal.hpp"

namespace vibroqfi::detail {

namespace {

struct Workspace {
    int N, M;
    FftPlan fwd2, bwd1;
    std::vector<cplx> K, dK, G;
    std::vector<cplx> twiddle;

    explicit Workspace(int n)
        : N(n), M(2 * n), fwd2(FftPlan::dft_2d(2 * n, 2 * n, FFTW_FORWARD)), bwd1(FftPlan::dft_1d(2 * n, FFTW_BACKWARD)) {
        std::size_t mm = static_cast<std::size_t>(M) * M;
        K.resize(mm);
        G.resize(static_cast<std::size_t>(M));
        twiddle.resize(static_cast<std::size_t>(M));
        for (int k = 0; k < M; ++k) twiddle[static_cast<std::size_t>(k)] = std::polar(1.0, 2.0 * units::pi * k / M);
    }
};

// K holds FFT2(kernel); writes D_{j+delta, j} for j in [0, N - delta)
void extract_band(Workspace& w, std::vector<cplx>& Khat, const std::vector<cplx>& X, const std::vector<cplx>& Xc,
                  int delta, Matrix& D) {
    const int M = w.M;
    const std::size_t m = static_cast<std::size_t>(M);
    std::fill(w.G.begin(), w.G.end(), cplx{});
    for (int u = 0; u < M; ++u) {
        cplx a = X[static_cast<std::size_t>(u)] * w.twiddle[static_cast<std::size_t>((static_cast<long>(u) * delta) % M)];
        const cplx* row = Khat.data() + static_cast<std::size_t>(u) * m;
        for (int v = 0; v < M; ++v) {
            int wv = u + v;
            if (wv >= M) wv -= M;
            w.G[static_cast<std::size_t>(wv)] += a * row[v] * Xc[static_cast<std::size_t>(v)];
        }
    }
    w.bwd1.execute(w.G.data(), w.G.data());
    const double inv = 1.0 / (static_cast<double>(M) * M);
    for (int j = 0; j + delta < w.N; ++j) D(j + delta, j) = w.G[static_cast<std::size_t>(j)] * inv;
}

} // namespace

BandResult band_tdm(const std::vector<cplx>& xi, const TimeGrid& grid, double Gamma, double Gamma_perp,
                    const Lambda1Table& L, bool deriv) {
    const int N = grid.n;
    const double h = grid.step();
    const double kappa = 0.5 * (Gamma + Gamma_perp);
    const std::size_t n = static_cast<std::size_t>(N);
    auto theta = [](int p) { return p == 0 ? 0.5 : 1.0; };

    Workspace w(N);
    const int M = w.M;
    const std::size_t m = static_cast<std::size_t>(M);
    if (deriv) w.dK.resize(m * m);

    std::vector<cplx> X(m, 0.0), Xc(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        X[i] = xi[i];
        Xc[i] = std::conj(xi[i]);
    }
    {
        auto p1 = FftPlan::dft_1d(M, FFTW_FORWARD);
        p1.execute(X.data(), X.data());
        p1.execute(Xc.data(), Xc.data());
    }

    // S_i = h sum_p theta_p xi_{i-p} e^{-kappa p h + Lambda_1(-p h)}
    Vector S = Vector::Zero(N), dS = Vector::Zero(N);
    std::vector<cplx> ker(n);
    for (int p = 0; p < N; ++p) ker[static_cast<std::size_t>(p)] = theta(p) * h * std::exp(-kappa * p * h + L.at(-p));
    for (int i = 0; i < N; ++i)
        for (int p = 0; p <= i; ++p) {
            cplx t = ker[static_cast<std::size_t>(p)] * xi[static_cast<std::size_t>(i - p)];
            S(i) += t;
            dS(i) += -0.5 * p * h * t;
        }

    Matrix D = Matrix::Zero(N, N), dD;
    if (deriv) dD = Matrix::Zero(N, N);
    const double h2 = h * h;
    for (int delta = 0; delta < N; ++delta) {
        std::fill(w.K.begin(), w.K.end(), cplx{});
        if (deriv) std::fill(w.dK.begin(), w.dK.end(), cplx{});
        const cplx Ld = L.at(delta);
        const int qmax = N - 1 - delta;
        for (int p = 0; p < N; ++p) {
            const cplx a = L.at(-p) - L.at(delta - p) + Ld;
            const double tp = theta(p) * h2;
            cplx* row = w.K.data() + static_cast<std::size_t>(p) * m;
            for (int q = 0; q <= qmax; ++q) {
                cplx e = a + std::conj(L.at(-q)) - std::conj(L.at(-q - delta)) + L.at(delta - p + q) -
                         kappa * (p + q) * h;
                row[q] = tp * theta(q) * std::exp(e);
                if (deriv) w.dK[static_cast<std::size_t>(p) * m + static_cast<std::size_t>(q)] = -0.5 * (p + q) * h * row[q];
            }
        }
        w.fwd2.execute(w.K.data(), w.K.data());
        extract_band(w, w.K, X, Xc, delta, D);
        if (deriv) {
            w.fwd2.execute(w.dK.data(), w.dK.data());
            extract_band(w, w.dK, X, Xc, delta, dD);
        }
    }
    // upper triangle by Hermiticity
    for (int j = 0; j < N; ++j)
        for (int i = 0; i < j; ++i) {
            D(i, j) = std::conj(D(j, i));
            if (deriv) dD(i, j) = std::conj(dD(j, i));
        }
    for (int i = 0; i < N; ++i) {
        D(i, i) = D(i, i).real();
        if (deriv) dD(i, i) = dD(i, i).real();
    }

    Eigen::Map<const Vector> x(xi.data(), N);
    BandResult out;
    const double G = Gamma;
    out.rho = x * x.adjoint() - G * (S * x.adjoint() + x * S.adjoint()) + (G * G) * D;
    out.rho = 0.5 * (out.rho + out.rho.adjoint()).eval();
    if (deriv) {
        out.drho = -(S * x.adjoint() + x * S.adjoint()) - G * (dS * x.adjoint() + x * dS.adjoint()) + 2.0 * G * D +
                   (G * G) * dD;
        out.drho = 0.5 * (out.drho + out.drho.adjoint()).eval();
    }
    return out;
}

QuadraticSums point_quadratic_sums(const std::vector<cplx>& xi, const TimeGrid& grid, double Gamma,
                                   double Gamma_perp, const Lambda1Table& L, bool want_bound) {
    // A_j = sum_{m,n<j} X_mn, B_j = sum (j-m) X_mn, C_j = sum (j-m)(j-n) X_mn,
    // X_mn = xi_m xi_n^* z^{2j-m-n} e^{Lambda_1((m-n)h)}
    const int N = grid.n;
    const double h = grid.step();
    const double kappa = want_bound ? 0.5 * Gamma : 0.5 * (Gamma + Gamma_perp);
    const std::size_t n = static_cast<std::size_t>(N);
    std::vector<cplx> wr(n);
    for (int r = 0; r < N; ++r) wr[static_cast<std::size_t>(r)] = std::exp(-kappa * r * h + L.at(-r));
    const double z2 = std::exp(-2.0 * kappa * h);
    const double alpha = -0.5 * Gamma * h; // kernel weight 1 - Gamma (tau - t) / 2
    const double h2 = h * h;

    QuadraticSums out;
    out.pe.assign(n, 0.0);
    out.dpe.assign(n, 0.0);
    if (want_bound) out.bound.assign(n, 0.0);
    double A = 0.0, C = 0.0;
    cplx B = 0.0;
    for (int j = 0; j < N; ++j) {
        cplx Q = 0.0, Qp = 0.0;
        for (int r = 1; r <= j; ++r) {
            cplx t = xi[static_cast<std::size_t>(j - r)] * wr[static_cast<std::size_t>(r)];
            Q += t;
            Qp += static_cast<double>(r) * t;
        }
        const cplx x = xi[static_cast<std::size_t>(j)];
        const double x2 = std::norm(x);
        const std::size_t jj = static_cast<std::size_t>(j);
        double core = A + std::real(std::conj(x) * Q) + 0.25 * x2;
        out.pe[jj] = Gamma * h2 * core;
        double dkappa = -h * (2.0 * B.real() + std::real(std::conj(x) * Qp));
        out.dpe[jj] = h2 * core + Gamma * h2 * 0.5 * dkappa;
        if (want_bound)
            out.bound[jj] = h2 * (A + 2.0 * alpha * B.real() + alpha * alpha * C +
                                  std::real(std::conj(x) * (Q + alpha * Qp)) + 0.25 * x2);
        double An = z2 * (A + 2.0 * std::real(std::conj(x) * Q) + x2);
        cplx Bn = z2 * (B + A + x * std::conj(Q) + std::conj(x) * (Q + Qp) + x2);
        double Cn = z2 * (C + 2.0 * B.real() + A + 2.0 * std::real(std::conj(x) * (Q + Qp)) + x2);
        A = An;
        B = Bn;
        C = Cn;
    }
    return out;
}

} // namespace vibroqfi::detail
