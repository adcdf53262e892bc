#pragma once

#include <string>

namespace tdscha {

// All dynamics runs in natural units: mass-rescaled length L0, energy E0 and
// the derived time t0 = sqrt(M0*L0^2/E0) chosen so the equations of motion
// carry no conversion factors.  The record below holds hbar and kB expressed
// in those units plus the factors needed to translate user-facing quantities
// (femtoseconds, terahertz, kelvin, kV/cm) at the program boundary.
struct UnitSystem {
    std::string name;
    double hbar = 1.0;           // E0 * t0
    double kB = 1.0;             // E0 / K (temperature unit)
    double t0_fs = 1.0;          // one natural time unit in femtoseconds
    double field_to_force = 1.0; // force per unit effective charge per field unit

    double time_from_fs(double fs) const { return fs / t0_fs; }
    double time_to_fs(double t) const { return t * t0_fs; }
    // linear frequency in THz -> angular frequency in rad per natural time unit
    double omega_from_thz(double f_thz) const {
        return 2.0 * pi_ * f_thz * 1.0e-3 * t0_fs;
    }
    double omega_to_thz(double omega) const {
        return omega / (2.0 * pi_ * 1.0e-3 * t0_fs);
    }
    double force_from_field(double field) const { return field * field_to_force; }
    double thermal_energy(double T) const { return kB * T; }

private:
    static constexpr double pi_ = 3.14159265358979323846;
};

// Dimensionless preset: hbar = kB = 1, fields are already forces.
UnitSystem natural_units(double hbar = 1.0, double kB = 1.0);

// Angstrom*sqrt(amu) / eV / derived time preset.  Field amplitudes in kV/cm,
// effective charges in e/sqrt(amu).  Constants from CODATA 2018.
UnitSystem physical_units();

// CODATA 2018 values used to derive the physical preset (SI).
namespace codata {
inline constexpr double amu_kg = 1.66053906660e-27;
inline constexpr double ev_J = 1.602176634e-19;
inline constexpr double hbar_Js = 1.054571817e-34;
inline constexpr double kB_JK = 1.380649e-23;
} // namespace codata

} // namespace tdscha
