#pragma once

#include "tdscha/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace tdscha {

struct Rk45Options {
    double rel_tol = 1.0e-8;
    double abs_tol = 1.0e-10;
    double h_init = 0.0; // 0 = choose automatically
    double h_max = std::numeric_limits<double>::infinity();
    std::uint64_t max_steps = 50'000'000;
};

struct Rk45Stats {
    std::uint64_t accepted = 0;
    std::uint64_t rejected = 0;
    std::uint64_t rhs_calls = 0;
};

// Embedded 5(4) pair with the classic Dormand-Prince nodes, FSAL, and the
// quartic interpolant for off-step sampling.  `sample(t, y)` fires at
// t0, t0+stride, ... and at t1; `accept(t, y)` fires after every accepted
// step.  Sampling is decoupled from step selection.
template <class Rhs, class Sample, class Accept>
Rk45Stats rk45_integrate(Rhs&& rhs, double t0, double t1, Eigen::VectorXd y,
                         double stride, Sample&& sample, Accept&& accept,
                         const Rk45Options& opt = {}) {
    // Node coefficients
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    // Difference between the 5th- and 4th-order weights
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
    // Interpolant weights
    constexpr double d1 = -12715105075.0 / 11282082432.0;
    constexpr double d3 = 87487479700.0 / 32700410799.0;
    constexpr double d4 = -10690763975.0 / 1880347072.0;
    constexpr double d5 = 701980252875.0 / 199316789632.0;
    constexpr double d6 = -1453857185.0 / 822651844.0;
    constexpr double d7 = 69997945.0 / 29380423.0;

    if (!(t1 > t0))
        throw InputError("integration span must be forward in time");
    const Eigen::Index n = y.size();
    Eigen::VectorXd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ytmp(n), ynew(n),
        yerr(n);

    Rk45Stats stats;
    double t = t0;
    rhs(t, y, k1);
    ++stats.rhs_calls;

    // initial step from the local derivative scale
    double h = opt.h_init;
    if (h <= 0.0) {
        double d0 = 0.0, d1n = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc = opt.abs_tol + opt.rel_tol * std::abs(y[i]);
            d0 += (y[i] / sc) * (y[i] / sc);
            d1n += (k1[i] / sc) * (k1[i] / sc);
        }
        d0 = std::sqrt(d0 / static_cast<double>(n));
        d1n = std::sqrt(d1n / static_cast<double>(n));
        h = (d0 < 1.0e-5 || d1n < 1.0e-5) ? 1.0e-6 : 0.01 * d0 / d1n;
        h = std::min(h, (t1 - t0) / 10.0);
    }
    h = std::min(h, opt.h_max);

    // sampling bookkeeping
    std::uint64_t sample_index = 0;
    const auto sample_time = [&](std::uint64_t m) { return t0 + static_cast<double>(m) * stride; };
    sample(t0, y);
    ++sample_index;
    const bool do_stride = stride > 0.0;

    bool last_rejected = false;
    while (t < t1) {
        if (stats.accepted + stats.rejected >= opt.max_steps)
            throw NumericsError("integrator exceeded the step budget");
        h = std::min(h, t1 - t);
        if (h < 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), 1.0))
            throw NumericsError("integrator step size underflow");

        ytmp = y + h * (a21 * k1);
        rhs(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        rhs(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        rhs(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        rhs(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        rhs(t + h, ytmp, k6);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        rhs(t + h, ynew, k7);
        stats.rhs_calls += 6;

        yerr = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double sc =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err += (yerr[i] / sc) * (yerr[i] / sc);
        }
        err = std::sqrt(err / static_cast<double>(n));

        if (err <= 1.0) {
            const double t_new = t + h;
            accept(t_new, ynew);
            if (do_stride) {
                // emit dense samples that fall inside the accepted step
                Eigen::VectorXd rc2 = ynew - y;
                Eigen::VectorXd rc3 = h * k1 - rc2;
                Eigen::VectorXd rc4 = rc2 - h * k7 - rc3;
                Eigen::VectorXd rc5 =
                    h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                while (true) {
                    const double ts = sample_time(sample_index);
                    if (ts > t_new + 1.0e-12 * std::max(1.0, std::abs(t_new)) || ts > t1)
                        break;
                    const double th = (ts - t) / h;
                    const double th1 = 1.0 - th;
                    Eigen::VectorXd ys =
                        y + th * (rc2 + th1 * (rc3 + th * (rc4 + th1 * rc5)));
                    sample(ts, ys);
                    ++sample_index;
                }
            }
            t = t_new;
            y.swap(ynew);
            k1.swap(k7); // first-same-as-last
            ++stats.accepted;
            double fac = 0.9 * std::pow(err > 1.0e-30 ? err : 1.0e-30, -0.2);
            fac = std::clamp(fac, 0.2, last_rejected ? 1.0 : 5.0);
            h = std::min(h * fac, opt.h_max);
            last_rejected = false;
        } else {
            ++stats.rejected;
            const double fac = std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
            h *= fac;
            last_rejected = true;
        }
    }
    // terminal sample, exact end state
    const double span_tol = 1.0e-9 * std::max(1.0, std::abs(t1 - t0));
    if (!do_stride || std::abs(sample_time(sample_index - 1) - t1) > span_tol)
        sample(t1, y);
    return stats;
}

} // namespace tdscha
