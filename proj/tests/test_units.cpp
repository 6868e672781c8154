#include "doctest.h"

#include <cmath>

#include "vibroqfi/units.hpp"

using namespace vibroqfi;
using namespace vibroqfi::units;

TEST_CASE("wavenumber conversion") {
    CHECK(wavenumber_to_angular(0.0) == 0.0);
    CHECK(wavenumber_to_angular(100.0) == doctest::Approx(18.83652).epsilon(1e-6));
    CHECK(wavenumber_to_angular(1000.0) == doctest::Approx(188.3652).epsilon(1e-6));
    CHECK_THROWS_AS(wavenumber_to_angular(-1.0), DomainError);
    for (double w : {1e-3, 0.37, 18.8, 1234.5}) {
        double back = wavenumber_to_angular(angular_to_wavenumber(w));
        CHECK(std::abs(back - w) <= 1e-14 * w);
    }
}

TEST_CASE("thermal occupation") {
    CHECK(thermal_occupation(5.0, 0.0) == 1.0);
    CHECK(thermal_occupation(wavenumber_to_angular(100.0), 300.0) == doctest::Approx(4.25).epsilon(0.01 / 4.25));
    CHECK(std::abs(thermal_occupation(wavenumber_to_angular(1000.0), 300.0) - 1.02) <= 0.01);
    CHECK_THROWS_AS(thermal_occupation(0.0, 300.0), DomainError);
    CHECK_THROWS_AS(thermal_occupation(-1.0, 300.0), DomainError);

    double prev = 1e300;
    for (double w = 1.0; w < 400.0; w *= 1.5) {
        double n = thermal_occupation(w, 300.0);
        CHECK(n < prev);
        prev = n;
    }
    prev = 0.0;
    for (double T = 10.0; T < 2000.0; T *= 1.7) {
        double n = thermal_occupation(50.0, T);
        CHECK(n > prev);
        prev = n;
    }
}
