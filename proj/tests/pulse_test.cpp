#include "doctest.h"

#include "tdscha/errors.hpp"
#include "tdscha/pulse.hpp"

#include <cmath>

using tdscha::ModeBasis;
using tdscha::Pulse;

namespace {

ModeBasis two_mode_basis() {
    ModeBasis b;
    b.eigvecs = Eigen::MatrixXd::Identity(2, 2);
    b.freqs = Eigen::VectorXd::Ones(2);
    b.labels = {"IR", "OTHER"};
    b.zeff = Eigen::VectorXd::Zero(2);
    b.zeff[0] = 0.85;
    return b;
}

} // namespace

TEST_CASE("field is a phase-locked gaussian wave packet") {
    Pulse p;
    p.amplitude = 2.0;
    p.omega = 3.0;
    p.sigma = 5.0;
    p.t0 = 40.0;
    CHECK(p.field(40.0) == doctest::Approx(2.0).epsilon(1e-14)); // cos(0) at center
    const double dt = 1.25;
    const double want = 2.0 * std::cos(3.0 * dt) * std::exp(-dt * dt / 50.0);
    CHECK(p.field(40.0 + dt) == doctest::Approx(want).epsilon(1e-14));
    CHECK(p.field(40.0 - dt) == doctest::Approx(want).epsilon(1e-14)); // even envelope, even carrier
    CHECK(std::abs(p.field(40.0 + 8.0 * 5.0)) < 2.0 * 1e-13); // tails die off
}

TEST_CASE("validation insists on an explicit center time") {
    Pulse p;
    p.amplitude = 1.0;
    p.omega = 1.0;
    p.sigma = 1.0;
    CHECK_THROWS_AS(p.validate(), tdscha::InputError); // t0 left NaN
    p.t0 = 0.0;
    CHECK_NOTHROW(p.validate());
    p.sigma = -1.0;
    CHECK_THROWS_AS(p.validate(), tdscha::InputError);
}

TEST_CASE("drive force scales effective charges by the field") {
    const ModeBasis b = two_mode_basis();
    Pulse p;
    p.amplitude = 3.0;
    p.omega = 0.0;
    p.sigma = 1.0e6;
    p.t0 = 0.0;
    const Eigen::VectorXd f = tdscha::drive_force(p, b, 0.0);
    CHECK(f[0] == doctest::Approx(3.0 * 0.85).epsilon(1e-14));
    CHECK(f[1] == 0.0);

    ModeBasis no_charges = b;
    no_charges.zeff.resize(0);
    CHECK_THROWS_AS(tdscha::drive_force(p, no_charges, 0.0), tdscha::InputError);
}

TEST_CASE("polarization tilt rotates charge between modes") {
    const ModeBasis b = two_mode_basis();
    Pulse p;
    p.amplitude = 1.0;
    p.omega = 0.0;
    p.sigma = 1.0;
    p.t0 = 0.0;
    p.tilt_rad = 0.3;
    p.tilt_mode = 1;
    const Eigen::VectorXd z = tdscha::effective_drive_charges(p, b);
    CHECK(z[0] == doctest::Approx(0.85 * std::cos(0.3)).epsilon(1e-12));
    CHECK(z[1] == doctest::Approx(0.85 * std::sin(0.3)).epsilon(1e-12));
    CHECK(z.norm() == doctest::Approx(0.85).epsilon(1e-12)); // total charge preserved
}
