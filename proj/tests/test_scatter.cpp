#include "doctest.h"

#include <cmath>

#include <Eigen/Eigenvalues>

#include "vibroqfi/scatter.hpp"
#include "vibroqfi/units.hpp"

using namespace vibroqfi;

namespace {

double max_rel(const Matrix& a, const Matrix& ref) { return (a - ref).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(); }

double omega_cm(double nu) { return units::wavenumber_to_angular(nu); }

} // namespace

TEST_CASE("no-vibration excitation follows G^2 t^2 e^{-G t}") {
    const double G = 0.5;
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
    CHECK(err < 1e-4);
    CHECK(excitation_probability(pulse, em, BathSpec::none(), 2.0 / G) == doctest::Approx(4.0 * std::exp(-2.0)).epsilon(2e-4));
    CHECK(excitation_probability(pulse, EmitterParams{0.0, 0.0}, BathSpec::none(), 1.0) == 0.0);
    CHECK(c.pe.back() < 1e-4);
}

TEST_CASE("band algorithm reproduces the nested-sum oracle") {
    const double G = 2.0;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 128, 11.0 / G);
    const BathSpec baths[] = {BathSpec::none(), BathSpec::single_mode(0.8, omega_cm(100.0), 0.0),
                              BathSpec::single_mode(0.5, omega_cm(100.0), 300.0),
                              BathSpec::drude_lorentz(0.5, 1.9, 300.0), BathSpec::brownian(0.5, 1.9, 18.8, 300.0)};
    for (const auto& bath : baths) {
        for (double gp : {0.0, 0.2}) {
            EmitterParams em{G, gp};
            auto fast = build_tdm(pulse, em, bath, grid, KernelRule::PointSampled);
            auto ref = tdm_oracle(pulse, em, bath, grid);
            INFO(bath.describe(), " Gamma_perp=", gp);
            CHECK(max_rel(fast.rho, ref.rho) < 1e-6);
            CHECK(fast.p_loss == doctest::Approx(ref.p_loss).epsilon(1e-6));
        }
    }
    CHECK_THROWS_AS(tdm_oracle(pulse, EmitterParams{G, 0.0}, BathSpec::none(), default_grid(pulse, 512, 12.0 / G)),
                    DomainError);
}

TEST_CASE("TDM normalization, Hermiticity and positivity") {
    const double G = 0.5;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 512, 20.0 / G);
    for (double l0 : {0.0, 0.3, 1.0})
        for (double T : {0.0, 300.0})
            for (double gp : {0.0, 0.5 * G}) {
                auto bath = BathSpec::single_mode(l0, omega_cm(100.0), T);
                auto t = build_tdm(pulse, EmitterParams{G, gp}, bath, grid);
                INFO("lambda0=", l0, " T=", T, " Gamma_perp=", gp);
                CHECK(t.trace() + t.p_loss == doctest::Approx(1.0).epsilon(1e-3));
                CHECK((t.rho - t.rho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * t.rho.cwiseAbs().maxCoeff());
                Eigen::SelfAdjointEigenSolver<Matrix> es(t.rho, Eigen::EigenvaluesOnly);
                CHECK(es.eigenvalues().minCoeff() >= -1e-8 * es.eigenvalues().maxCoeff());
                double purity = (t.rho * t.rho).trace().real() * std::pow(grid.step(), 2);
                CHECK(purity <= 1.0 + 1e-6);
                if (l0 == 0.0 && gp == 0.0) CHECK(purity == doctest::Approx(1.0).epsilon(1e-3));
            }
}

TEST_CASE("Gamma=0 leaves the pulse unchanged") {
    auto pulse = PulseShape::gaussian(2.0, 10.0);
    auto grid = default_grid(pulse, 256, 30.0);
    auto t = build_tdm(pulse, EmitterParams{0.0, 0.0}, BathSpec::single_mode(0.5, 3.0, 0.0), grid);
    for (int i = 0; i < grid.n; i += 17)
        for (int j = 0; j < grid.n; j += 13)
            CHECK(std::abs(t.rho(i, j) - pulse_time(pulse, grid.at(i)) * std::conj(pulse_time(pulse, grid.at(j)))) < 1e-14);
}

TEST_CASE("the two kernel rules converge to one another") {
    const double G = 0.5;
    auto pulse = PulseShape::gaussian(1.5, 8.0);
    auto grid = default_grid(pulse, 512, 30.0);
    auto bath = BathSpec::single_mode(0.6, 2.0, 0.0);
    EmitterParams em{G, 0.2};
    auto a = build_tdm(pulse, em, bath, grid, KernelRule::CellAveraged);
    auto b = build_tdm(pulse, em, bath, grid, KernelRule::PointSampled);
    CHECK(max_rel(a.rho, b.rho) < 1e-3);
    CHECK(a.p_loss == doctest::Approx(b.p_loss).epsilon(1e-3));
}

TEST_CASE("analytic Gamma derivative matches finite differences") {
    const double G = 0.5;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 256, 16.0 / G);
    auto sm = BathSpec::single_mode(0.5, omega_cm(30.0), 300.0);
    auto dl = BathSpec::drude_lorentz(0.3, 1.5, 300.0);
    struct Case {
        BathSpec bath;
        KernelRule rule;
    };
    for (const auto& c : {Case{sm, KernelRule::CellAveraged}, Case{sm, KernelRule::PointSampled},
                          Case{dl, KernelRule::PointSampled}}) {
        for (double gp : {0.0, 0.25}) {
            INFO(c.bath.describe(), " rule=", static_cast<int>(c.rule), " Gamma_perp=", gp);
            auto d = tdm_derivative(pulse, EmitterParams{G, gp}, c.bath, grid, Parameter::Gamma, c.rule);
            double h = 1e-4 * G;
            auto up = build_tdm(pulse, EmitterParams{G + h, gp}, c.bath, grid, c.rule);
            auto dn = build_tdm(pulse, EmitterParams{G - h, gp}, c.bath, grid, c.rule);
            Matrix fd = (up.rho - dn.rho) / (2.0 * h);
            CHECK(max_rel(d.drho, fd) < 1e-5);
            CHECK(d.dp_loss == doctest::Approx((up.p_loss - dn.p_loss) / (2.0 * h)).epsilon(1e-4));
            CHECK((d.drho - d.drho.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * d.drho.cwiseAbs().maxCoeff());
            double tr = grid.step() * d.drho.diagonal().real().sum();
            // zero up to the O(h^2) error of the discrete normalization
            CHECK(std::abs(tr + d.dp_loss) < 5e-3 / G);
        }
    }
}

TEST_CASE("Huang-Rhys derivative matches a plain central difference") {
    const double G = 0.5;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto grid = default_grid(pulse, 256, 16.0 / G);
    for (double l0 : {0.0, 0.4}) {
        auto bath = BathSpec::single_mode(l0, 3.0, 100.0);
        EmitterParams em{G, 0.2};
        auto d = tdm_derivative(pulse, em, bath, grid, Parameter::HuangRhys);
        Matrix fd;
        double dl;
        if (l0 > 0.0) {
            double h = 1e-3;
            auto bu = bath, bd = bath;
            bu.lambda0 += h;
            bd.lambda0 -= h;
            auto up = build_tdm(pulse, em, bu, grid), dn = build_tdm(pulse, em, bd, grid);
            fd = (up.rho - dn.rho) / (2.0 * h);
            dl = (up.p_loss - dn.p_loss) / (2.0 * h);
        } else {
            double h = 1e-5;
            auto bu = bath, b2 = bath;
            bu.lambda0 = h;
            b2.lambda0 = 2.0 * h;
            auto f0 = build_tdm(pulse, em, bath, grid), f1 = build_tdm(pulse, em, bu, grid), f2 = build_tdm(pulse, em, b2, grid);
            fd = (-3.0 * f0.rho + 4.0 * f1.rho - f2.rho) / (2.0 * h);
            dl = (-3.0 * f0.p_loss + 4.0 * f1.p_loss - f2.p_loss) / (2.0 * h);
        }
        INFO("lambda0=", l0);
        CHECK(max_rel(d.drho, fd) < 1e-5);
        CHECK(d.dp_loss == doctest::Approx(dl).epsilon(1e-4));
    }
    CHECK_THROWS_AS(tdm_derivative(pulse, EmitterParams{G, 0.0}, BathSpec::none(), grid, Parameter::HuangRhys),
                    DomainError);
}

TEST_CASE("loss probability") {
    const double G = 0.5;
    auto pulse = PulseShape::exponential(1.0 / G);
    auto none = BathSpec::none();
    CHECK(loss_probability(pulse, EmitterParams{G, 0.0}, none, 5.0) == 0.0);
    EmitterParams em{G, G};
    double prev = 0.0;
    for (double t : {1.0, 3.0, 6.0, 12.0, 30.0}) {
        double p = loss_probability(pulse, em, none, t);
        CHECK(p >= prev);
        prev = p;
    }
    // lambda0 = 0, Gamma_perp = Gamma, t -> inf against the oracle on a coarse grid
    auto g = default_grid(pulse, 256, 30.0 / G);
    auto ref = tdm_oracle(pulse, em, none, g);
    auto fine = loss_probability(pulse, em, none, std::numeric_limits<double>::infinity(), 8192);
    CHECK(fine == doctest::Approx(ref.p_loss).epsilon(2e-3));
    // p_e = 4 (e^{-G t/2} - e^{-G t})^2 here, so the total loss is 2/3
    CHECK(fine == doctest::Approx(2.0 / 3.0).epsilon(1e-4));
}

TEST_CASE("grid refusals") {
    const double G = 0.5;
    auto pulse = PulseShape::exponential(1.0 / G);
    EmitterParams em{G, 0.0};
    CHECK_THROWS_AS(build_tdm(pulse, em, BathSpec::none(), default_grid(pulse, 32, 20.0 / G)), GridError);
    CHECK_THROWS_AS(build_tdm(pulse, em, BathSpec::none(), default_grid(pulse, 256, 5.0 / G)), GridError);
    CHECK_THROWS_AS(TimeGrid::make(0.0, 1.0, 100), GridError);
    auto fast = BathSpec::single_mode(0.5, omega_cm(1000.0), 0.0);
    CHECK_THROWS_AS(build_tdm(pulse, em, fast, default_grid(pulse, 256, 20.0 / G), KernelRule::PointSampled), GridError);
    CHECK_NOTHROW(build_tdm(pulse, em, fast, default_grid(pulse, 256, 20.0 / G)));
}
