#include "vibroqfi/units.hpp"

#include <cmath>
#include <limits>

namespace vibroqfi::units {

double wavenumber_to_angular(double nu_cm) {
    if (!(nu_cm >= 0.0)) throw DomainError("wavenumber must be >= 0");
    return 2.0 * pi * c_cm_per_ps * nu_cm;
}

double angular_to_wavenumber(double omega) {
    if (!(omega >= 0.0)) throw DomainError("angular frequency must be >= 0");
    return omega / (2.0 * pi * c_cm_per_ps);
}

double thermal_angular(double T_kelvin) {
    if (!(T_kelvin >= 0.0)) throw DomainError("temperature must be >= 0");
    return wavenumber_to_angular(kB_cm_per_K * T_kelvin);
}

double inverse_temperature(double T_kelvin) {
    double kT = thermal_angular(T_kelvin);
    return kT > 0.0 ? 1.0 / kT : std::numeric_limits<double>::infinity();
}

double thermal_occupation(double omega, double T_kelvin) {
    if (!(omega > 0.0)) throw DomainError("thermal_occupation needs omega > 0");
    if (!(T_kelvin >= 0.0)) throw DomainError("temperature must be >= 0");
    if (T_kelvin == 0.0) return 1.0;
    double x = omega / (2.0 * thermal_angular(T_kelvin));
    if (x > 40.0) return 1.0 + 2.0 * std::exp(-2.0 * x);
    return 1.0 / std::tanh(x);
}

} // namespace vibroqfi::units
