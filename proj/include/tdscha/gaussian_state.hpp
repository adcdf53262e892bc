#pragma once

#include "tdscha/mode_basis.hpp"
#include "tdscha/pes.hpp"
#include "tdscha/units.hpp"

#include <Eigen/Dense>

namespace tdscha {

// Gaussian density in phase space: centroids R, P plus the fluctuation
// matrices A = <dR dR>, B = <dP dP> and the unsymmetrized cross block
// G = <dR dP>.  A and B stay symmetric under the flow; G does not.
struct GaussianState {
    double t = 0.0;
    Eigen::VectorXd R, P;
    Eigen::MatrixXd A, B, G;

    int dim() const { return static_cast<int>(R.size()); }
    void validate(double pd_floor = 1.0e-12) const;
};

GaussianState make_state(int dim); // zeroed centroids, identity fluctuations

// Equilibrium Gaussian of a harmonic surface with curvature kappa at
// temperature T: occupations n = 1/(exp(hbar w / kB T) - 1) per mode,
// A = sum hbar (2n+1) / (2 w) e e^T, B = sum hbar w (2n+1) / 2 e e^T, G = 0.
// Throws when kappa has a nonpositive eigenvalue.
GaussianState thermal_state(const Eigen::MatrixXd& kappa, double T, const UnitSystem& units);

// Per-mode Robertson-Schrodinger products A_mm B_mm - ((G + G^T)/2)_mm^2,
// bounded below by hbar^2/4 for any valid state.
Eigen::VectorXd uncertainty_products(const GaussianState& s, const ModeBasis& basis);

struct EnergyBreakdown {
    double kinetic = 0.0;   // (|P|^2 + Tr B) / 2
    double potential = 0.0; // ensemble average of V
    double total = 0.0;
};

EnergyBreakdown state_energy(const GaussianState& s, const QuarticPES& pes);

} // namespace tdscha
