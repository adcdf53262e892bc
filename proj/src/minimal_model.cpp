#include "tdscha/minimal_model.hpp"

#include "tdscha/errors.hpp"

#include <cmath>

namespace tdscha {

void MinimalModelParams::validate() const {
    if (!(omega > 0.0))
        throw InputError("minimal model frequency must be positive");
    if (!(a_eq > 0.0))
        throw InputError("minimal model equilibrium fluctuation must be positive");
    if (!(tau > 0.0))
        throw InputError("minimal model growth timescale must be positive");
    if (!std::isfinite(psi) || !std::isfinite(alpha))
        throw InputError("minimal model parameters must be finite");
}

MinimalResult minimal_model_integrate(const MinimalModelParams& params,
                                      const std::function<double(double)>& r,
                                      const std::function<double(double)>& r_rate,
                                      double t_span, const MinimalOptions& opts) {
    params.validate();
    if (!r || !r_rate)
        throw InputError("centroid path callbacks are required");
    if (!(t_span > 0.0) || !(opts.stride > 0.0))
        throw InputError("bad integration window");
    const double bound = opts.blow_up > 0.0 ? opts.blow_up : 10.0 * params.a_eq;

    const double w2 = params.omega * params.omega;
    auto rhs = [&](double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) {
        const double da = y[0], v = y[1], w = y[2];
        const double rt = r(t);
        const double drag = params.a_eq + (opts.a_eq_only ? 0.0 : da);
        dy.resize(3);
        dy[0] = v;
        dy[1] = w;
        dy[2] = -4.0 * v * (w2 + 0.5 * params.psi * (rt * rt + da)) -
                params.psi * drag * (2.0 * r_rate(t) * rt + v);
    };

    MinimalResult out;
    auto sample = [&](double t, const Eigen::VectorXd& y) {
        out.t.push_back(t);
        out.a_fe.push_back(params.a_eq + y[0]);
    };
    auto accept = [&](double t, const Eigen::VectorXd& y) {
        if (!std::isfinite(y[0]) || std::abs(y[0]) > bound) {
            (void)t;
            throw NumericsError("fluctuation response left the trust window");
        }
    };

    try {
        rk45_integrate(rhs, 0.0, t_span, Eigen::VectorXd::Zero(3), opts.stride, sample,
                       accept, opts.ode);
    } catch (const NumericsError&) {
        out.truncated = true;
    }
    return out;
}

double quench_closed_form(const MinimalModelParams& params, double t) {
    params.validate();
    const double t2 = params.tau * params.tau;
    const double denom =
        4.0 * params.omega * params.omega * t2 + params.psi * params.a_eq * t2 + 4.0;
    const double num =
        params.alpha * params.alpha * t2 * params.psi * std::exp(2.0 * t / params.tau);
    return params.a_eq * (1.0 - num / denom);
}

DragThreshold dragging_threshold(double omega_fe, double beta) {
    if (!(omega_fe > 0.0))
        throw InputError("dragging threshold needs a positive mode frequency");
    DragThreshold out;
    if (beta == 0.0)
        return out; // infinite threshold, flag stays false
    out.amplitude = omega_fe / std::sqrt(std::abs(beta));
    out.finite = true;
    return out;
}

} // namespace tdscha
