#pragma once

#include "tdscha/mode_basis.hpp"

#include <Eigen/Dense>

#include <limits>

namespace tdscha {

// Gaussian-envelope carrier pulse, phase-locked to the envelope center:
//   E(t) = amplitude * cos(omega (t - t0)) * exp(-(t - t0)^2 / (2 sigma^2))
// amplitude is already converted to force per unit effective charge.
// t0 must be set explicitly; there is no sensible default for it.
struct Pulse {
    double amplitude = 0.0;
    double omega = 0.0;
    double sigma = 0.0;
    double t0 = std::numeric_limits<double>::quiet_NaN();
    // Optional polarization tilt: rotates a sin(tilt) fraction of the total
    // effective charge onto another mode.  Off by default.
    double tilt_rad = 0.0;
    int tilt_mode = -1;

    double field(double t) const;
    void validate() const;
};

// f_i(t) = Z_i E(t) with Z the mass-rescaled effective-charge vector of the
// basis (tilt-rotated when requested).  Missing charges are an error.
Eigen::VectorXd drive_force(const Pulse& pulse, const ModeBasis& basis, double t);

// The tilt-adjusted charge vector used by drive_force.
Eigen::VectorXd effective_drive_charges(const Pulse& pulse, const ModeBasis& basis);

} // namespace tdscha
