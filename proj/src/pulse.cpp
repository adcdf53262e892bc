#include "tdscha/pulse.hpp"

#include "tdscha/errors.hpp"

#include <cmath>

namespace tdscha {

void Pulse::validate() const {
    if (std::isnan(t0))
        throw InputError("pulse center time t0 is required");
    if (!(sigma > 0.0))
        throw InputError("pulse envelope width must be positive");
    if (amplitude < 0.0)
        throw InputError("pulse amplitude must be nonnegative");
}

double Pulse::field(double t) const {
    const double dt = t - t0;
    return amplitude * std::cos(omega * dt) * std::exp(-0.5 * dt * dt / (sigma * sigma));
}

Eigen::VectorXd effective_drive_charges(const Pulse& pulse, const ModeBasis& basis) {
    if (basis.zeff.size() == 0)
        throw InputError("drive requires effective charges in the mode basis");
    Eigen::VectorXd Z = basis.zeff;
    if (pulse.tilt_rad != 0.0) {
        if (pulse.tilt_mode < 0 || pulse.tilt_mode >= basis.n_modes())
            throw InputError("tilt mode index out of range");
        Z = std::cos(pulse.tilt_rad) * Z +
            std::sin(pulse.tilt_rad) * basis.zeff.norm() *
                basis.mode_vector(pulse.tilt_mode);
    }
    return Z;
}

Eigen::VectorXd drive_force(const Pulse& pulse, const ModeBasis& basis, double t) {
    pulse.validate();
    return effective_drive_charges(pulse, basis) * pulse.field(t);
}

} // namespace tdscha
