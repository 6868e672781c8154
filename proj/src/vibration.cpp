#include "vibroqfi/vibration.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/ooura_fourier_integrals.hpp>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/digamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "fft.hpp"

namespace vibroqfi {

using units::pi;

double SpectralTable::operator()(double w) const {
    if (omega.empty() || w <= 0.0 || w > omega.back()) return 0.0;
    auto it = std::upper_bound(omega.begin(), omega.end(), w);
    std::size_t i = static_cast<std::size_t>(it - omega.begin());
    double x0 = i == 0 ? 0.0 : omega[i - 1];
    double y0 = i == 0 ? 0.0 : J[i - 1];
    if (i == omega.size()) return J.back();
    double x1 = omega[i], y1 = J[i];
    return y0 + (y1 - y0) * (w - x0) / (x1 - x0);
}

SpectralTable load_spectral_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open spectral density table: " + path);
    SpectralTable tab;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ss(line);
        double w, j;
        if (!(ss >> w)) continue;
        if (!(ss >> j)) throw DomainError(path + ":" + std::to_string(lineno) + ": expected two columns");
        if (w < 0.0 || j < 0.0) throw DomainError(path + ":" + std::to_string(lineno) + ": negative entry");
        if (!tab.omega.empty() && w <= tab.omega.back())
            throw DomainError(path + ":" + std::to_string(lineno) + ": frequencies must increase");
        tab.omega.push_back(units::wavenumber_to_angular(w));
        tab.J.push_back(units::wavenumber_to_angular(j));
    }
    if (tab.omega.size() < 2) throw DomainError("spectral density table needs at least two rows: " + path);
    return tab;
}

BathSpec BathSpec::none() { return {}; }

BathSpec BathSpec::single_mode(double lambda0, double omega0, double T) {
    BathSpec b;
    b.kind = BathKind::SingleMode;
    b.lambda0 = lambda0;
    b.omega0 = omega0;
    b.temperature = T;
    b.validate();
    return b;
}

BathSpec BathSpec::drude_lorentz(double lambda, double gamma, double T) {
    BathSpec b;
    b.kind = BathKind::DrudeLorentz;
    b.lambda = lambda;
    b.gamma = gamma;
    b.temperature = T;
    b.validate();
    return b;
}

BathSpec BathSpec::brownian(double lambda, double gamma, double omega0, double T) {
    BathSpec b;
    b.kind = BathKind::Brownian;
    b.lambda = lambda;
    b.gamma = gamma;
    b.omega0 = omega0;
    b.temperature = T;
    b.validate();
    return b;
}

BathSpec BathSpec::tabulated(SpectralTable J, double T) {
    BathSpec b;
    b.kind = BathKind::Tabulated;
    b.table = std::make_shared<const SpectralTable>(std::move(J));
    b.temperature = T;
    b.validate();
    return b;
}

void BathSpec::validate() const {
    if (!(temperature >= 0.0)) throw DomainError("temperature must be >= 0");
    switch (kind) {
    case BathKind::None: break;
    case BathKind::SingleMode:
        if (!(lambda0 >= 0.0)) throw DomainError("Huang-Rhys factor must be >= 0");
        if (!(omega0 > 0.0)) throw DomainError("mode frequency must be > 0");
        break;
    case BathKind::DrudeLorentz:
        if (!(lambda >= 0.0) || !(gamma > 0.0)) throw DomainError("Drude-Lorentz needs lambda >= 0, gamma > 0");
        break;
    case BathKind::Brownian:
        if (!(lambda >= 0.0) || !(gamma > 0.0) || !(omega0 > 0.0))
            throw DomainError("Brownian needs lambda >= 0, gamma > 0, omega0 > 0");
        if (omega0 <= gamma / 2.0) throw UnsupportedRegime("over-damped Brownian oscillator (omega0 <= gamma/2)");
        break;
    case BathKind::Tabulated:
        if (!table || table->omega.size() < 2) throw DomainError("tabulated bath needs a spectral table");
        break;
    }
}

double BathSpec::nbar() const {
    if (kind != BathKind::SingleMode) throw DomainError("nbar is defined for the single mode");
    return units::thermal_occupation(omega0, temperature);
}

double BathSpec::reorganization() const {
    switch (kind) {
    case BathKind::None: return 0.0;
    case BathKind::SingleMode: return lambda0 * omega0;
    case BathKind::DrudeLorentz:
    case BathKind::Brownian: return lambda;
    case BathKind::Tabulated: {
        // int J/W dW on the piecewise-linear table
        double s = 0.0, x0 = 0.0, y0 = 0.0;
        for (std::size_t i = 0; i < table->omega.size(); ++i) {
            double x1 = table->omega[i], y1 = table->J[i];
            if (x0 > 0.0) {
                double slope = (y1 - y0) / (x1 - x0);
                s += (y0 - slope * x0) * std::log(x1 / x0) + slope * (x1 - x0);
            } else {
                s += y1; // J linear from the origin: J/W constant = y1/x1 over [0, x1]
            }
            x0 = x1;
            y0 = y1;
        }
        return s;
    }
    }
    return 0.0;
}

double BathSpec::frequency_scale() const {
    switch (kind) {
    case BathKind::None: return 0.0;
    case BathKind::SingleMode: return omega0;
    case BathKind::DrudeLorentz: return gamma;
    case BathKind::Brownian: return std::max(omega0, gamma);
    case BathKind::Tabulated: {
        auto it = std::max_element(table->J.begin(), table->J.end());
        return table->omega[static_cast<std::size_t>(it - table->J.begin())];
    }
    }
    return 0.0;
}

std::string BathSpec::describe() const {
    std::ostringstream os;
    os.precision(17);
    switch (kind) {
    case BathKind::None: os << "none"; break;
    case BathKind::SingleMode: os << "single_mode lambda0=" << lambda0 << " omega0=" << omega0; break;
    case BathKind::DrudeLorentz: os << "drude_lorentz lambda=" << lambda << " gamma=" << gamma; break;
    case BathKind::Brownian: os << "brownian lambda=" << lambda << " gamma=" << gamma << " omega0=" << omega0; break;
    case BathKind::Tabulated:
        os << "tabulated n=" << table->omega.size();
        for (std::size_t i = 0; i < table->omega.size(); ++i) os << ' ' << table->omega[i] << ':' << table->J[i];
        break;
    }
    os << " T=" << temperature;
    return os.str();
}

double spectral_density(const BathSpec& bath, double w) {
    if (w <= 0.0) return 0.0;
    switch (bath.kind) {
    case BathKind::None:
    case BathKind::SingleMode: return 0.0; // a delta line, not a density
    case BathKind::DrudeLorentz:
        return 2.0 * bath.lambda * w * bath.gamma / (pi * (w * w + bath.gamma * bath.gamma));
    case BathKind::Brownian: {
        double w2 = w * w, o2 = bath.omega0 * bath.omega0;
        return 2.0 * bath.lambda * bath.gamma * o2 * w /
               (pi * ((w2 - o2) * (w2 - o2) + bath.gamma * bath.gamma * w2));
    }
    case BathKind::Tabulated: return (*bath.table)(w);
    }
    return 0.0;
}

// ---------------------------------------------------------------- quadrature

namespace {

double coth_half(double beta, double w) {
    if (!std::isfinite(beta)) return 1.0;
    double x = 0.5 * beta * w;
    if (x > 20.0) return 1.0 + 2.0 * std::exp(-2.0 * x);
    return 1.0 / std::tanh(x);
}

} // namespace

cplx lambda1_quadrature(const std::function<double(double)>& J, double T, double t, double scale,
                        const std::vector<double>& knots, double support) {
    using boost::math::quadrature::gauss_kronrod;
    if (t == 0.0) return {0.0, 0.0};
    const double beta = units::inverse_temperature(T);
    const double a = std::abs(t);
    const double sg = t > 0.0 ? 1.0 : -1.0;
    if (!(scale > 0.0)) scale = 1.0;

    auto f_re = [&](double w) {
        if (w <= 0.0) return 0.0;
        double s = std::sin(0.5 * w * a);
        return -2.0 * J(w) * coth_half(beta, w) * s * s / (w * w);
    };
    auto f_im = [&](double w) {
        if (w <= 0.0) return 0.0;
        return J(w) * std::sin(w * a) / (w * w);
    };

    double top = support > 0.0 ? support : 40.0 * scale;
    for (double k : knots)
        if (support <= 0.0) top = std::max(top, 2.0 * k);

    std::vector<double> br{0.0, top};
    for (double s : {1e-3, 1e-2, 0.1, 0.3, 0.6, 1.0, 1.5, 3.0, 10.0})
        if (s * scale < top) br.push_back(s * scale);
    for (double k : knots)
        if (k > 0.0 && k < top) br.push_back(k);
    std::sort(br.begin(), br.end());
    br.erase(std::unique(br.begin(), br.end()), br.end());

    const double osc = pi / a; // half period of the oscillating factor
    const unsigned depth = knots.size() > 64 ? 3u : 8u;
    double re = 0.0, im = 0.0, err = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        double lo = br[i], hi = br[i + 1];
        int pieces = std::max(1, static_cast<int>(std::ceil((hi - lo) / osc)));
        double w = (hi - lo) / pieces;
        for (int p = 0; p < pieces; ++p) {
            double x0 = lo + p * w, x1 = (p + 1 == pieces) ? hi : lo + (p + 1) * w;
            double e1 = 0.0, e2 = 0.0;
            re += gauss_kronrod<double, 31>::integrate(f_re, x0, x1, depth, 1e-11, &e1);
            im += gauss_kronrod<double, 31>::integrate(f_im, x0, x1, depth, 1e-11, &e2);
            err += std::abs(e1) + std::abs(e2);
        }
    }

    if (support <= 0.0) {
        // tail [top, inf): split cos(Wa) - 1 into an oscillatory Fourier part and a plain part
        auto g1 = [&](double x) {
            double w = top + x;
            return J(w) * coth_half(beta, w) / (w * w);
        };
        auto g2 = [&](double x) {
            double w = top + x;
            return J(w) / (w * w);
        };
        double e = 0.0;
        double plain = gauss_kronrod<double, 31>::integrate(
            [&](double x) { return g1(x); }, 0.0, std::numeric_limits<double>::infinity(), 15, 1e-13, &e);
        boost::math::quadrature::ooura_fourier_cos<double> fc;
        boost::math::quadrature::ooura_fourier_sin<double> fs;
        auto c1 = fc.integrate(g1, a);
        auto s1 = fs.integrate(g1, a);
        auto c2 = fc.integrate(g2, a);
        auto s2 = fs.integrate(g2, a);
        double ct = std::cos(top * a), st = std::sin(top * a);
        re += ct * c1.first - st * s1.first - plain;
        im += st * c2.first + ct * s2.first;
        double mag = std::abs(c1.first) + std::abs(s1.first) + std::abs(c2.first) + std::abs(s2.first);
        double rel = std::max({c1.second, s1.second, c2.second, s2.second});
        err += rel * mag + e * std::abs(plain);
    }
    if (!(std::isfinite(re) && std::isfinite(im)) || err > 1e-8)
        throw NumericalError("lambda1 quadrature did not converge (error estimate " + std::to_string(err) + ")");
    return {re, sg * im};
}

cplx lambda1_quadrature(const BathSpec& bath, double t) {
    auto J = [&](double w) { return spectral_density(bath, w); };
    switch (bath.kind) {
    case BathKind::None: return {0.0, 0.0};
    case BathKind::SingleMode:
        throw DomainError("single-mode bath has no spectral density to integrate");
    case BathKind::DrudeLorentz: return lambda1_quadrature(J, bath.temperature, t, bath.gamma);
    case BathKind::Brownian: {
        double wc = std::sqrt(bath.omega0 * bath.omega0 - bath.gamma * bath.gamma / 4.0);
        std::vector<double> knots{wc, std::max(1e-12, wc - bath.gamma), wc + bath.gamma};
        return lambda1_quadrature(J, bath.temperature, t, std::max(bath.omega0, bath.gamma), knots);
    }
    case BathKind::Tabulated:
        return lambda1_quadrature(J, bath.temperature, t, bath.frequency_scale(), bath.table->omega,
                                  bath.table->omega.back());
    }
    return {0.0, 0.0};
}

// ---------------------------------------------------------------- closed forms

namespace {

// sum_{n>=1} 1/(n(n^2 - a^2))
double sum_n_n2a2(double a) {
    if (a < 0.5) {
        double s = 0.0, ak = 1.0;
        for (int k = 0; k < 200; ++k) {
            double term = ak * boost::math::zeta(3.0 + 2.0 * k);
            s += term;
            if (term < 1e-18 * s) break;
            ak *= a * a;
        }
        return s;
    }
    const double euler = boost::math::constants::euler<double>();
    return -(boost::math::digamma(1.0 - a) + boost::math::digamma(1.0 + a) + 2.0 * euler) / (2.0 * a * a);
}

cplx lambda1_drude_lorentz(const BathSpec& b, double t) {
    const double lam = b.lambda, g = b.gamma, beta = units::inverse_temperature(b.temperature);
    const double a = std::abs(t);
    const double sg = t > 0.0 ? 1.0 : -1.0;
    const double decay = -std::expm1(-g * a); // 1 - e^{-g a}
    double im = sg * (lam / g) * decay;

    const double c = 2.0 * pi / beta;
    const double alpha = g / c;
    double nearest = std::round(alpha);
    if (nearest >= 1.0 && std::abs(alpha - nearest) < 1e-9)
        throw UnsupportedRegime("Drude-Lorentz cutoff coincides with a Matsubara frequency");

    // sum_n (1 - e^{-nu_n a}) / (nu_n (nu_n^2 - g^2)), nu_n = c n
    double total = sum_n_n2a2(alpha) / (c * c * c);
    double x = c * a;
    double ncut_d = std::ceil(40.0 / x) + 1.0;
    long ncut = static_cast<long>(std::min(ncut_d, 1e8));
    double head = 0.0, head_full = 0.0;
    for (long n = ncut; n >= 1; --n) { // small terms first
        double nu = c * static_cast<double>(n);
        double den = nu * (nu * nu - g * g);
        head += -std::expm1(-nu * a) / den;
        head_full += 1.0 / den;
    }
    double mats = head + (total - head_full);

    double cotv = 1.0 / std::tan(0.5 * beta * g);
    double re = -2.0 * lam * a / (g * beta) + (lam / g) * cotv * decay + 4.0 * lam * g / beta * mats;
    return {re, im};
}

cplx lambda1_brownian(const BathSpec& b, double t) {
    const double lam = b.lambda, g = b.gamma, W0 = b.omega0;
    const double beta = units::inverse_temperature(b.temperature);
    const double W02 = W0 * W0;
    const double Wc = std::sqrt(W02 - g * g / 4.0);
    const double a = std::abs(t);
    const double sg = t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0);
    const double e = std::exp(-g * a / 2.0);
    const double cw = std::cos(Wc * t), sw = std::sin(Wc * t);
    const double A = W02 - g * g / 2.0;

    // sinh(bWc)/(cosh(bWc) - cos(bg/2)) and sin(bg/2)/(...) without overflow
    const double xb = beta * Wc;
    const double q = std::exp(-xb);
    const double den = 1.0 + q * q - 2.0 * q * std::cos(beta * g / 2.0);
    const double r_sinh = (1.0 - q * q) / den;
    const double r_sin = 2.0 * q * std::sin(beta * g / 2.0) / den;

    double re = -2.0 * lam * g * a / (beta * W02) -
                lam / (W02 * Wc) *
                    (r_sinh * (A * (1.0 - e * cw) - g * Wc * sg * e * sw) -
                     r_sin * (g * Wc * (1.0 - e * cw) + A * sg * e * sw));
    double im = lam * g * sg / W02 + lam * e / (W02 * Wc) * (A * sw - sg * g * Wc * cw);

    // Matsubara poles of coth
    const double c = 2.0 * pi / beta;
    double mats = 0.0;
    for (long n = 1; n < 10000000; ++n) {
        double nu = c * static_cast<double>(n);
        double d = nu * ((nu * nu + W02) * (nu * nu + W02) - g * g * nu * nu);
        double term = std::expm1(-nu * a) / d;
        mats += term;
        if (std::abs(term) < 1e-18 * std::abs(mats) && n > 4) break;
        if (mats == 0.0) break;
    }
    re += 4.0 * lam * g * W02 / beta * mats;
    return {re, im};
}

} // namespace

cplx lambda1(const BathSpec& bath, double t) {
    if (t == 0.0) return {0.0, 0.0};
    switch (bath.kind) {
    case BathKind::None: return {0.0, 0.0};
    case BathKind::SingleMode: {
        double nb = bath.nbar();
        double x = bath.omega0 * t;
        double s = std::sin(0.5 * x);
        return {bath.lambda0 * nb * (-2.0 * s * s), bath.lambda0 * std::sin(x)};
    }
    case BathKind::DrudeLorentz:
        if (bath.temperature == 0.0) return lambda1_quadrature(bath, t);
        return lambda1_drude_lorentz(bath, t);
    case BathKind::Brownian:
        if (bath.temperature == 0.0) return lambda1_quadrature(bath, t);
        return lambda1_brownian(bath, t);
    case BathKind::Tabulated: return lambda1_quadrature(bath, t);
    }
    return {0.0, 0.0};
}

cplx lambda2(const BathSpec& bath, double t1, double t2, double tau, double taup) {
    auto L = [&](double x) { return lambda1(bath, x); };
    return L(t1 - tau) + std::conj(L(t2 - taup)) - L(t1 - taup) - std::conj(L(t2 - tau)) + L(t1 - t2) + L(tau - taup);
}

Lambda1Table lambda1_table(const BathSpec& bath, double h, int n) {
    Lambda1Table tab;
    tab.h = h;
    tab.n = n;
    tab.values.assign(static_cast<std::size_t>(2 * n - 1), cplx{});
    for (int k = 0; k < n; ++k) {
        cplx v = lambda1(bath, k * h);
        tab.values[static_cast<std::size_t>(n - 1 + k)] = v;
        tab.values[static_cast<std::size_t>(n - 1 - k)] = std::conj(v);
    }
    return tab;
}

// ---------------------------------------------------------------- Franck-Condon

namespace {

constexpr double eps_th = 1e-9;

double log_factorial(int k) { return std::lgamma(static_cast<double>(k) + 1.0); }

// e^{-lambda0 nbar} I_k(x) ((nbar+1)/(nbar-1))^{k/2}, k >= 0, nbar > 1
double fc_positive(int k, double l0, double nb) {
    double x = l0 * std::sqrt(nb * nb - 1.0);
    double Ik = boost::math::cyl_bessel_i(static_cast<double>(k), x);
    if (Ik == 0.0) return 0.0;
    double lg = -l0 * nb + std::log(Ik) + 0.5 * k * std::log((nb + 1.0) / (nb - 1.0));
    return std::exp(lg);
}

} // namespace

double franck_condon_f(int k, double l0, double nb) {
    if (!(l0 >= 0.0)) throw DomainError("lambda0 must be >= 0");
    if (!(nb >= 1.0)) throw DomainError("nbar must be >= 1");
    if (l0 == 0.0) return k == 0 ? 1.0 : 0.0;
    if (nb - 1.0 < eps_th) {
        if (k < 0) return 0.0;
        return std::exp(-l0 + k * std::log(l0) - log_factorial(k));
    }
    if (k >= 0) return fc_positive(k, l0, nb);
    // I_{-k} = I_k
    return fc_positive(-k, l0, nb) * std::pow((nb - 1.0) / (nb + 1.0), -k);
}

double franck_condon_d(int k, double l0, double nb) {
    if (!(l0 >= 0.0)) throw DomainError("lambda0 must be >= 0");
    if (!(nb >= 1.0)) throw DomainError("nbar must be >= 1");
    if (l0 == 0.0) return k == 0 ? 1.0 : 0.0;
    double sign = (k % 2 == 0) ? 1.0 : -1.0;
    if (nb - 1.0 < eps_th) {
        if (k < 0) return 0.0;
        return sign * std::exp(l0 + k * std::log(l0) - log_factorial(k));
    }
    return sign * std::exp(2.0 * l0 * nb) * franck_condon_f(k, l0, nb);
}

int truncation_order(double l0, double nb) {
    double mu = l0 * nb;
    if (mu == 0.0) return 8;
    for (int K = 1; K < 100000; ++K) {
        double lg = -mu + K * std::log(mu) - log_factorial(K);
        if (K >= 8 && K > mu && lg < std::log(1e-12)) return K;
    }
    throw NumericalError("Franck-Condon truncation order did not converge");
}

FcSeries FcSeries::make(double l0, double nb, int K) {
    FcSeries s;
    s.lambda0 = l0;
    s.nbar = nb;
    s.K = K > 0 ? K : truncation_order(l0, nb);
    s.span = 3 * s.K;
    s.f.resize(static_cast<std::size_t>(2 * s.span + 1));
    s.d.resize(s.f.size());
    for (int k = -s.span; k <= s.span; ++k) {
        s.f[static_cast<std::size_t>(k + s.span)] = franck_condon_f(k, l0, nb);
        s.d[static_cast<std::size_t>(k + s.span)] = franck_condon_d(k, l0, nb);
    }
    return s;
}

double coefficient_C(int l, int m, int n, const FcSeries& s) {
    const int K = s.K;
    double total = 0.0;
    for (int k6 = -K; k6 <= K; ++k6) {
        double a6 = s.f_at(k6);
        if (a6 == 0.0) continue;
        for (int k3 = -K; k3 <= K; ++k3) {
            double a3 = s.d_at(k3) * s.f_at(n + k3 + k6);
            if (a3 == 0.0) continue;
            for (int k4 = -K; k4 <= K; ++k4) {
                double a4 = s.d_at(k4) * s.f_at(m + k4 + k6) * s.f_at(l - k3 - k4 - k6);
                total += a6 * a3 * a4;
            }
        }
    }
    return total;
}

double CTensor::operator()(int l, int m, int n) const {
    int r = reach();
    if (std::abs(l) > r || std::abs(m) > r || std::abs(n) > r) return 0.0;
    auto w = [&](int i) { return static_cast<std::size_t>(((i % P) + P) % P); };
    std::size_t p = static_cast<std::size_t>(P);
    return data[(w(m) * p + w(-n)) * p + w(l)];
}

CTensor c_tensor(double l0, double nb, int K, int torus) {
    if (K <= 0) K = truncation_order(l0, nb);
    int P = 32;
    while (P < 4 * K + 8) P *= 2;
    if (torus > 0) P = torus;
    for (;;) {
        std::size_t p = static_cast<std::size_t>(P);
        std::vector<cplx> g(p);
        for (std::size_t j = 0; j < p; ++j) {
            double ph = 2.0 * pi * static_cast<double>(j) / P;
            double s = std::sin(0.5 * ph);
            g[j] = cplx(l0 * nb * (-2.0 * s * s), l0 * std::sin(ph));
        }
        std::vector<cplx> G(p * p * p);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t c = 0; c < p; ++c) {
                    cplx e = g[a] + std::conj(g[b]) - g[(c + b) % p] - std::conj(g[(a + p - c) % p]) + g[c] +
                             g[(c + b + p - a) % p];
                    G[(a * p + b) * p + c] = std::exp(e);
                }
        auto plan = detail::FftPlan::dft_3d(P, P, P, FFTW_FORWARD);
        plan.execute(G.data(), G.data());
        // forward transform / P^3 = coefficient of e^{+i(a A + b B + c C)}
        CTensor T;
        T.P = P;
        T.data.resize(G.size());
        double inv = 1.0 / (static_cast<double>(P) * P * P);
        for (std::size_t i = 0; i < G.size(); ++i) T.data[i] = G[i].real() * inv;
        double edge = 0.0, peak = 0.0;
        std::size_t h = p / 2;
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = 0; b < p; ++b)
                for (std::size_t c = 0; c < p; ++c) {
                    double v = std::abs(T.data[(a * p + b) * p + c]);
                    peak = std::max(peak, v);
                    if (a == h || b == h || c == h) edge = std::max(edge, v);
                }
        if (torus > 0) return T;
        if (edge <= 1e-15 * std::max(peak, 1.0) || P >= 256) {
            if (edge > 1e-12 * std::max(peak, 1.0))
                throw NumericalError("C tensor torus too small for this coupling");
            return T;
        }
        P *= 2;
    }
}

} // namespace vibroqfi
