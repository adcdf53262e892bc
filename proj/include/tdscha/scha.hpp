#pragma once

#include "tdscha/gaussian_state.hpp"

#include <optional>
#include <vector>

namespace tdscha {

// Frequency of the harmonic ensemble whose position variance equals `a`
// at temperature T: a = hbar (2 n(omega) + 1) / (2 omega).  Monotone, so
// the root is unique.
double omega_from_variance(double a, double temperature, const UnitSystem& units);

// Variational free energy of the Gaussian ensemble (R, A) at temperature T.
// Reduces to <V> + hbar^2/8 Tr A^{-1} at T = 0.
double free_energy(const QuarticPES& pes, const Eigen::VectorXd& R,
                   const Eigen::MatrixXd& A, double temperature,
                   const UnitSystem& units);

struct RelaxOptions {
    double temperature = 0.0;
    int max_iter = 500;
    double f_tol = 1.0e-8;      // max force component on the free subspace
    double a_tol = 1.0e-8;      // max self-consistency residual of A
    double mix = 0.3;           // fluctuation mixing fraction
    double trust_radius = 0.5;  // cap on the centroid Newton step
    // rows are unit directions whose centroid projection is held fixed
    Eigen::MatrixXd clamp_dirs;
    std::optional<Eigen::MatrixXd> A0; // initial fluctuations; default from |phi|
};

struct RelaxResult {
    GaussianState state;     // R, A, B at the fixed point, G = 0
    double free_energy = 0.0;
    Eigen::VectorXd freqs;   // sqrt of the ensemble curvature eigenvalues
    int iterations = 0;
    bool converged = false;
};

// Self-consistent relaxation: alternate the thermal fluctuation update
// A <- (1-mix) A + mix A_th(kappa(R,A)) with damped Newton steps on the
// centroid.  Fluctuations are never clamped, only centroid projections.
RelaxResult scha_relax(const QuarticPES& pes, const Eigen::VectorXd& R0,
                       const RelaxOptions& opts, const UnitSystem& units);

struct FesCurve {
    Eigen::VectorXd values;          // clamped coordinate grid
    Eigen::VectorXd F;               // relaxed free energy per point
    std::vector<RelaxResult> points; // full result per point (warm-started)
};

// Free energy surface along `dir`: clamp R . dir at each grid value and relax
// everything else.  Grid points run left to right with warm starts.
FesCurve clamped_fes(const QuarticPES& pes, const Eigen::VectorXd& dir,
                     const Eigen::VectorXd& values, const RelaxOptions& opts,
                     const UnitSystem& units);

struct ModeFrequency {
    double omega = 0.0;     // natural units; negative magnitude if unstable
    double curvature = 0.0; // quadratic coefficient of the even fit
    bool stable = false;
};

// Curvature of the clamped free energy surface at dir . R = center, from a
// five point even quadratic fit with spacing h.  omega = sqrt(2 c2).
ModeFrequency fe_frequency(const QuarticPES& pes, const Eigen::VectorXd& dir,
                           double center, double h, const RelaxOptions& opts,
                           const UnitSystem& units);

enum class Region {
    ferro_ground = 1,     // displaced minimum below the symmetric one
    ferro_metastable = 2, // displaced minimum exists but lies above
    para_only = 3,        // no displaced minimum survives the fluctuations
};

struct PhaseClass {
    Region region = Region::para_only;
    double delta_F = 0.0; // F(displaced) - F(symmetric); 0 when absent
    double v_star = 0.0;  // location of the displaced minimum
    double F_sym = 0.0;
    bool resolved = true; // false when the scan could not settle the region
};

// Classify the one dimensional phase along `dir` by scanning the clamped
// surface out to v_max and refining any interior minimum.
PhaseClass classify_region(const QuarticPES& pes, const Eigen::VectorXd& dir,
                           double v_max, int n_scan, const RelaxOptions& opts,
                           const UnitSystem& units);

struct PhaseCell {
    double x0 = 0.0;
    double v0 = 0.0;
    int region = 0;          // 1, 2, 3; 0 on error
    double omega_fe = 0.0;   // natural units, signed as in ModeFrequency
    double delta_F = 0.0;
    bool in_band = false;
    int error_code = 0;      // 0 ok, 1 unconverged, 2 unresolved, 3 failed
};

struct PhaseMapOptions {
    double temperature = 0.0;
    double band_lo_thz = 0.3; // band mask on the symmetric phase frequency
    double band_hi_thz = 0.5;
    int n_scan = 25;
    int workers = 1;
};

// Double well phase map over a grid of (x0, v0).  Each cell rewrites the
// well along `dir` on a copy of `base` and classifies the result, so the
// map can cover either a bare one dimensional well or a full coupled model
// whose other modes stay untouched.  Cells are computed in parallel but
// stored in row major grid order, so the output does not depend on the
// worker count.
std::vector<PhaseCell> phase_map(const QuarticPES& base, const Eigen::VectorXd& dir,
                                 const std::vector<double>& x0s,
                                 const std::vector<double>& v0s,
                                 const PhaseMapOptions& opts,
                                 const UnitSystem& units);

} // namespace tdscha
