#pragma once

#include "tdscha/gaussian_state.hpp"
#include "tdscha/pulse.hpp"
#include "tdscha/rk45.hpp"

#include <optional>
#include <vector>

namespace tdscha {

// Force on one mode split by origin.  harmonic is the bare quadratic piece,
// anharmonic collects the centroid-only cubic and quartic terms, quantum
// collects everything that involves the fluctuation matrix:
//   harmonic   = -phi R
//   anharmonic = -1/2 chi:RR - 1/6 psi:RRR
//   quantum    = -1/2 chi:A  - 1/2 psi:(R,A)
// The three channels sum to the exact ensemble force by construction.
struct ForceChannels {
    double harmonic = 0.0;
    double anharmonic = 0.0;
    double quantum = 0.0;
    double total() const { return harmonic + anharmonic + quantum; }
};

ForceChannels force_decomposition(const QuarticPES& pes, const Eigen::VectorXd& R,
                                  const Eigen::MatrixXd& A, const ModeBasis& basis, int mu);

// sign(v) * log10(1 + |v| / v_scale); keeps sign information on log plots
double signed_log(double v, double v_scale = 1.0);

struct ObsRecord {
    double t = 0.0;
    std::vector<double> R_mode;  // centroid per observed mode
    std::vector<double> A_mode;  // position fluctuation per observed mode
    std::vector<double> B_mode;  // momentum fluctuation per observed mode
    double f_harmonic = 0.0;     // channels on the target mode
    double f_anharmonic = 0.0;
    double f_quantum = 0.0;
    double f_total = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double total_energy = 0.0;
    double unc_min = 0.0; // smallest per-mode uncertainty product
};

struct Trajectory {
    std::vector<ObsRecord> obs;
    std::vector<GaussianState> snapshots;
    GaussianState final_state;
    Rk45Stats stats;
};

struct IntegrateOptions {
    Rk45Options ode;               // rel_tol 1e-8, abs_tol 1e-10
    double stride = 1.0;           // observable sampling interval
    std::vector<int> obs_modes;    // empty = all modes
    int target_mode = 0;           // mode for the channel decomposition
    int snapshot_every = 0;        // keep every k-th sampled state; 0 = none
    double pd_floor = 1.0e-12;     // abort threshold for min eigenvalue of A
};

// Evolves centroids and fluctuations under the self-consistent equations
//   dR = P,  dP = <f> + f_drive(t),
//   dA = G + G^T,  dB = -(kappa G) - (kappa G)^T,  dG = B - A kappa.
// Positive definiteness of A is monitored on every accepted step; losing it
// aborts with diagnostics rather than clipping.
Trajectory integrate(const QuarticPES& pes, const GaussianState& initial,
                     const ModeBasis& basis, const std::optional<Pulse>& pulse,
                     double t_span, const IntegrateOptions& opts, const UnitSystem& units);

// Same centroid dynamics with A, B, G pinned at their initial values.
Trajectory integrate_frozen_a(const QuarticPES& pes, const GaussianState& initial,
                              const ModeBasis& basis, const std::optional<Pulse>& pulse,
                              double t_span, const IntegrateOptions& opts,
                              const UnitSystem& units);

} // namespace tdscha
