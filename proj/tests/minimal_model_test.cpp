#include "doctest.h"

#include "tdscha/errors.hpp"
#include "tdscha/minimal_model.hpp"

#include <cmath>

using tdscha::MinimalModelParams;
using tdscha::MinimalOptions;

namespace {

MinimalModelParams base_params() {
    MinimalModelParams p;
    p.omega = 1.0;
    p.psi = 3.0;
    p.a_eq = 0.4;
    p.tau = 2.0;
    // drive amplitude far inside the linear regime of the quartic
    p.alpha = 1.0e-4 * std::sqrt(6.0 * p.omega * p.omega / p.psi);
    return p;
}

} // namespace

TEST_CASE("fluctuation response to an exponential centroid follows the closed form") {
    const MinimalModelParams p = base_params();
    MinimalOptions opts;
    opts.stride = 0.05;
    const double t_span = 6.9 * p.tau;
    auto r = [&](double t) { return p.alpha * std::exp(t / p.tau); };
    auto r_rate = [&](double t) { return p.alpha / p.tau * std::exp(t / p.tau); };
    const auto res = tdscha::minimal_model_integrate(p, r, r_rate, t_span, opts);
    REQUIRE(!res.truncated);
    REQUIRE(res.t.size() == static_cast<std::size_t>(t_span / opts.stride) + 1);

    // compare on the late window where the particular solution dominates the
    // start-up transient but the response is still linear
    int checked = 0;
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        if (res.t[i] < 3.5 * p.tau)
            continue;
        const double want = tdscha::quench_closed_form(p, res.t[i]);
        const double dev_want = want - p.a_eq;
        CHECK(std::abs(res.a_fe[i] - want) < 0.01 * std::abs(dev_want));
        ++checked;
    }
    CHECK(checked > 100);
    // the fluctuation shrinks as the centroid runs out
    CHECK(res.a_fe.back() < p.a_eq);
}

TEST_CASE("frozen-drag variant stays within the linear envelope too") {
    const MinimalModelParams p = base_params();
    MinimalOptions opts;
    opts.a_eq_only = true;
    auto r = [&](double t) { return p.alpha * std::exp(t / p.tau); };
    auto r_rate = [&](double t) { return p.alpha / p.tau * std::exp(t / p.tau); };
    const auto res = tdscha::minimal_model_integrate(p, r, r_rate, 6.9 * p.tau, opts);
    REQUIRE(!res.truncated);
    for (std::size_t i = 0; i < res.t.size(); ++i) {
        if (res.t[i] < 3.5 * p.tau)
            continue;
        const double want = tdscha::quench_closed_form(p, res.t[i]);
        CHECK(std::abs(res.a_fe[i] - want) < 0.01 * std::abs(want - p.a_eq));
    }
}

TEST_CASE("closed form matches its own differential equation") {
    // five fresh parameter sets; ringing frequency sqrt(4 w^2 + psi a_eq)
    // spans tau * Omega from about 1.5 to 6
    const double taus[] = {0.7, 1.2, 2.0, 2.6, 1.6};
    const double omegas[] = {1.0, 0.8, 1.3, 0.9, 1.9};
    const double psis[] = {3.0, 1.5, 5.0, 0.8, 2.2};
    const double aeqs[] = {0.4, 0.8, 0.25, 1.1, 0.3};
    for (int k = 0; k < 5; ++k) {
        MinimalModelParams p;
        p.omega = omegas[k];
        p.psi = psis[k];
        p.a_eq = aeqs[k];
        p.tau = taus[k];
        // half the usual drive so the quartic correction stays well under the
        // one percent bar even for the stiffest ringing
        p.alpha = 0.5e-4 * std::sqrt(6.0 * p.omega * p.omega / p.psi);
        CAPTURE(k);
        const double om_h = std::sqrt(4.0 * p.omega * p.omega + p.psi * p.a_eq);
        CHECK(p.tau * om_h > 1.4);
        CHECK(p.tau * om_h < 6.5);
        MinimalOptions opts;
        opts.ode.rel_tol = 1.0e-10;
        opts.ode.abs_tol = 1.0e-13;
        auto r = [&](double t) { return p.alpha * std::exp(t / p.tau); };
        auto rr = [&](double t) { return p.alpha / p.tau * std::exp(t / p.tau); };
        const auto res = tdscha::minimal_model_integrate(p, r, rr, 6.9 * p.tau, opts);
        REQUIRE(!res.truncated);
        for (std::size_t i = 0; i < res.t.size(); ++i) {
            if (res.t[i] < 3.5 * p.tau)
                continue;
            const double want = tdscha::quench_closed_form(p, res.t[i]);
            CHECK(std::abs(res.a_fe[i] - want) < 0.01 * std::abs(want - p.a_eq));
        }
    }
}

TEST_CASE("runaway response trips the trust window") {
    MinimalModelParams p = base_params();
    p.alpha = 0.5; // strong drive, quench leaves the linear regime fast
    MinimalOptions opts;
    opts.blow_up = 0.3;
    auto r = [&](double t) { return p.alpha * std::exp(t / p.tau); };
    auto rr = [&](double t) { return p.alpha / p.tau * std::exp(t / p.tau); };
    const auto res = tdscha::minimal_model_integrate(p, r, rr, 40.0, opts);
    CHECK(res.truncated);
    CHECK(res.t.size() < static_cast<std::size_t>(40.0 / opts.stride) + 1);
}

TEST_CASE("parameter validation") {
    MinimalModelParams p = base_params();
    p.omega = 0.0;
    CHECK_THROWS_AS(p.validate(), tdscha::InputError);
    p = base_params();
    p.a_eq = -0.1;
    CHECK_THROWS_AS(p.validate(), tdscha::InputError);
    p = base_params();
    p.tau = 0.0;
    CHECK_THROWS_AS(p.validate(), tdscha::InputError);
    p = base_params();
    CHECK_NOTHROW(p.validate());
    auto r = [](double) { return 0.0; };
    CHECK_THROWS_AS(tdscha::minimal_model_integrate(p, r, nullptr, 1.0, MinimalOptions{}),
                    tdscha::InputError);
}

TEST_CASE("direct dragging threshold") {
    const auto thr = tdscha::dragging_threshold(0.02, -1.0e-4);
    CHECK(thr.finite);
    CHECK(thr.amplitude == doctest::Approx(2.0).epsilon(1e-12));
    const auto inf = tdscha::dragging_threshold(0.02, 0.0);
    CHECK(!inf.finite);
    CHECK_THROWS_AS(tdscha::dragging_threshold(-1.0, 1.0), tdscha::InputError);
}
