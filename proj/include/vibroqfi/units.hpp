// units.hpp - internal unit convention and conversions
//
// Time in ps, rates (Gamma, Gamma_perp) in 1/ps, angular frequencies in rad/ps,
// temperature in K. Wavenumbers (cm^-1) only appear at the input boundary.

#pragma once

#include <stdexcept>

namespace vibroqfi {

struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

namespace units {

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double c_cm_per_ps = 0.0299792458;
inline constexpr double kB_cm_per_K = 0.6950348;

double wavenumber_to_angular(double nu_cm);
double angular_to_wavenumber(double omega);

// k_B T expressed as an angular frequency (rad/ps)
double thermal_angular(double T_kelvin);

// coth(Omega / 2 k_B T); exactly 1 at T = 0
double thermal_occupation(double omega, double T_kelvin);

// beta in ps (1/rad-ps units); infinity at T = 0
double inverse_temperature(double T_kelvin);

} // namespace units
} // namespace vibroqfi
