#pragma once

#include "tdscha/rk45.hpp"

#include <functional>
#include <vector>

namespace tdscha {

// Single mode reduction: the fluctuation a(t) of one quartic mode responding
// to a prescribed centroid path r(t), everything else integrated out.
struct MinimalModelParams {
    double omega = 0.0; // mode frequency of the symmetric state
    double psi = 0.0;   // quartic coefficient along the mode
    double a_eq = 0.0;  // equilibrium fluctuation
    double alpha = 0.0; // amplitude of the exponential growth ansatz
    double tau = 0.0;   // growth timescale
    void validate() const;
};

struct MinimalOptions {
    Rk45Options ode;
    double stride = 0.05;
    double blow_up = 0.0;   // |a - a_eq| abort bound; 0 means 10 a_eq
    bool a_eq_only = false; // freeze the fluctuation factor of the drag term
};

struct MinimalResult {
    std::vector<double> t;
    std::vector<double> a_fe; // full fluctuation a_eq + deviation
    bool truncated = false;   // stopped early at the blow-up bound
};

// Third order fluctuation response equation, integrated as a first order
// system in (da, da', da'') from an equilibrium start:
//   da''' + 4 da' [w^2 + psi (r^2 + da) / 2] + psi (a_eq + da) (2 r' r + da') = 0
// The a_eq_only switch replaces (a_eq + da) by a_eq in the last term.
MinimalResult minimal_model_integrate(const MinimalModelParams& params,
                                      const std::function<double(double)>& r,
                                      const std::function<double(double)>& r_rate,
                                      double t_span, const MinimalOptions& opts);

// Linearized response to r = alpha exp(t / tau) from equilibrium:
//   a(t) = a_eq [1 - alpha^2 tau^2 psi e^{2t/tau} / (4 w^2 tau^2 + psi a_eq tau^2 + 4)]
double quench_closed_form(const MinimalModelParams& params, double t);

struct DragThreshold {
    double amplitude = 0.0;
    bool finite = false;
};

// Minimum pumped-mode amplitude for the cross quartic coupling beta to drag
// the soft mode over directly: omega / sqrt(|beta|).
DragThreshold dragging_threshold(double omega_fe, double beta);

} // namespace tdscha
