// internal.hpp - shared pieces of the two TDM discretizations

#pragma once

#include <optional>
#include <vector>

#include "vibroqfi/scatter.hpp"

namespace vibroqfi::detail {

// int_a^b e^{s u} du and int_a^b u e^{s u} du, stable for small |s (b - a)|
struct CellMoments {
    cplx m0;
    cplx m1;
};
CellMoments cell_moments(cplx s, double a, double b);

std::vector<cplx> sample_pulse(const PulseShape& pulse, const TimeGrid& grid);

// Terms of the exp(Lambda_2) expansion kept for one single-mode build. Fixing
// them lets finite-difference builds in lambda0 share one discretization.
struct SidebandPlan {
    int K{0};                        // Franck-Condon orders kept in S and p_e
    int qmax{0};                     // sideband convolutions Y_q, |q| <= qmax
    std::vector<std::array<int, 3>> terms; // (l, m, n) of C^l_mn
    int torus{0};                    // C tensor torus size
};

struct SingleModeInputs {
    const std::vector<cplx>* xi;
    TimeGrid grid;
    double Gamma;
    double Gamma_perp;
    double lambda0;
    double omega0;
    double nbar;
};

SidebandPlan plan_sidebands(const SingleModeInputs& in);

struct SidebandResult {
    Matrix rho;
    Matrix drho; // d/dGamma, only when requested
    std::vector<double> pe;
    std::vector<double> dpe;
};

SidebandResult sideband_tdm(const SingleModeInputs& in, const SidebandPlan& plan, bool with_rho, bool with_gamma_derivative);

// time-domain bound integrand sum_k f_k |Y_k - (Gamma/2) dY_k|^2 at nodes
std::vector<double> sideband_bound_density(const SingleModeInputs& in, const SidebandPlan& plan);

struct BandResult {
    Matrix rho;
    Matrix drho;
};

BandResult band_tdm(const std::vector<cplx>& xi, const TimeGrid& grid, double Gamma, double Gamma_perp,
                    const Lambda1Table& L, bool with_gamma_derivative);

// O(N^2) quadratic-form sums for p_e, d p_e / d kappa and the bound integrand
struct QuadraticSums {
    std::vector<double> pe;    // p_e(tau_j)
    std::vector<double> dpe;   // d p_e / d Gamma at fixed Gamma_perp
    std::vector<double> bound; // bound integrand (uses kappa = Gamma/2 weights)
};
QuadraticSums point_quadratic_sums(const std::vector<cplx>& xi, const TimeGrid& grid, double Gamma,
                                   double Gamma_perp, const Lambda1Table& L, bool want_bound);

// Gamma_perp * (step * sum p_e + tail) and its running values
void accumulate_loss(ExcitationCurve& c, double Gamma_perp, const std::vector<double>* dpe, double* dloss);

} // namespace vibroqfi::detail
