#include "tdscha/units.hpp"

#include <cmath>

namespace tdscha {

UnitSystem natural_units(double hbar, double kB) {
    UnitSystem u;
    u.name = "natural";
    u.hbar = hbar;
    u.kB = kB;
    u.t0_fs = 1.0;
    u.field_to_force = 1.0;
    return u;
}

UnitSystem physical_units() {
    UnitSystem u;
    u.name = "physical";
    // t0 = sqrt(amu * Angstrom^2 / eV), in seconds
    const double t0_s = std::sqrt(codata::amu_kg * 1.0e-20 / codata::ev_J);
    u.t0_fs = t0_s * 1.0e15;
    u.hbar = codata::hbar_Js / (codata::ev_J * t0_s);
    u.kB = codata::kB_JK / codata::ev_J; // eV per kelvin
    // 1 kV/cm acting on a charge of 1 e is 1e-5 eV per Angstrom; mass rescaling
    // moves the 1/sqrt(amu) into the charge, so the factor is unchanged.
    u.field_to_force = 1.0e-5;
    return u;
}

} // namespace tdscha
