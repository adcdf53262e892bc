#include "doctest.h"

#include "support/oracles.hpp"
#include "tdscha/errors.hpp"
#include "tdscha/pes.hpp"

#include <random>

using tdscha::QuarticPES;

namespace {

QuarticPES random_pes(int dim, std::mt19937_64& rng) {
    QuarticPES pes(dim);
    std::uniform_int_distribution<int> pick(0, dim - 1);
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    pes.set_v_ref(val(rng));
    const int n2 = 2 + static_cast<int>(rng() % 6);
    const int n3 = 1 + static_cast<int>(rng() % 6);
    const int n4 = 1 + static_cast<int>(rng() % 6);
    for (int e = 0; e < n2; ++e)
        pes.phi().set({pick(rng), pick(rng)}, val(rng));
    for (int e = 0; e < n3; ++e)
        pes.chi().set({pick(rng), pick(rng), pick(rng)}, 0.5 * val(rng));
    for (int e = 0; e < n4; ++e)
        pes.psi().set({pick(rng), pick(rng), pick(rng), pick(rng)}, 0.5 * val(rng));
    return pes;
}

Eigen::MatrixXd random_spd(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Eigen::MatrixXd M(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            M(i, j) = val(rng);
    return 0.1 * (M * M.transpose()) + 0.05 * Eigen::MatrixXd::Identity(dim, dim);
}

Eigen::VectorXd random_vec(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = val(rng);
    return v;
}

} // namespace

TEST_CASE("point evaluations match independent dense sums") {
    std::mt19937_64 rng(31);
    for (int trial = 0; trial < 15; ++trial) {
        const int dim = 1 + static_cast<int>(rng() % 6);
        const QuarticPES pes = random_pes(dim, rng);
        const Eigen::VectorXd u = random_vec(dim, rng);
        CHECK(pes.potential_at(u) ==
              doctest::Approx(oracle::dense_potential(pes, u)).epsilon(1e-12));
        const Eigen::VectorXd g = pes.gradient_at(u);
        const Eigen::VectorXd g_ref = oracle::dense_gradient(pes, u);
        const Eigen::MatrixXd H = pes.hessian_at(u);
        const Eigen::MatrixXd H_ref = oracle::dense_hessian(pes, u);
        CHECK((g - g_ref).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((H - H_ref).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("gradient and hessian are derivatives of the potential") {
    std::mt19937_64 rng(32);
    const int dim = 4;
    const QuarticPES pes = random_pes(dim, rng);
    const Eigen::VectorXd u = random_vec(dim, rng);
    const double h = 1e-5;
    const Eigen::VectorXd g = pes.gradient_at(u);
    const Eigen::MatrixXd H = pes.hessian_at(u);
    for (int d = 0; d < dim; ++d) {
        Eigen::VectorXd up = u, dn = u;
        up[d] += h;
        dn[d] -= h;
        const double fd = (pes.potential_at(up) - pes.potential_at(dn)) / (2.0 * h);
        CHECK(g[d] == doctest::Approx(fd).epsilon(1e-8));
        const Eigen::VectorXd gfd = (pes.gradient_at(up) - pes.gradient_at(dn)) / (2.0 * h);
        for (int e = 0; e < dim; ++e)
            CHECK(H(d, e) == doctest::Approx(gfd[e]).epsilon(1e-7).scale(1.0));
    }
}

TEST_CASE("ensemble averages match Monte Carlo sampling") {
    std::mt19937_64 rng(5533);
    for (int trial = 0; trial < 3; ++trial) {
        const int dim = 2 + trial;
        const QuarticPES pes = random_pes(dim, rng);
        const Eigen::VectorXd R = random_vec(dim, rng);
        const Eigen::MatrixXd A = random_spd(dim, rng);

        const double v_wick = pes.ensemble_potential(R, A);
        const Eigen::VectorXd f_wick = pes.ensemble_force(R, A);
        const Eigen::MatrixXd k_wick = pes.ensemble_curvature(R, A);

        const std::size_t n = 200000;
        auto v_mc = oracle::gaussian_mc(
            R, A, [&](const Eigen::VectorXd& x) { return pes.potential_at(x); }, n, rng);
        CHECK(std::abs(v_mc.mean - v_wick) < 4.0 * v_mc.se + 1e-12);

        const int d = static_cast<int>(rng() % dim);
        auto f_mc = oracle::gaussian_mc(
            R, A, [&](const Eigen::VectorXd& x) { return -pes.gradient_at(x)[d]; }, n, rng);
        CHECK(std::abs(f_mc.mean - f_wick[d]) < 4.0 * f_mc.se + 1e-12);

        const int i = static_cast<int>(rng() % dim);
        const int j = static_cast<int>(rng() % dim);
        auto k_mc = oracle::gaussian_mc(
            R, A, [&](const Eigen::VectorXd& x) { return pes.hessian_at(x)(i, j); }, n, rng);
        CHECK(std::abs(k_mc.mean - k_wick(i, j)) < 4.0 * k_mc.se + 1e-12);
    }
}

TEST_CASE("ensemble force and curvature are derivatives of the ensemble potential") {
    std::mt19937_64 rng(77);
    const int dim = 3;
    const QuarticPES pes = random_pes(dim, rng);
    const Eigen::VectorXd R = random_vec(dim, rng);
    const Eigen::MatrixXd A = random_spd(dim, rng);
    const double h = 1e-5;

    const Eigen::VectorXd f = pes.ensemble_force(R, A);
    for (int d = 0; d < dim; ++d) {
        Eigen::VectorXd up = R, dn = R;
        up[d] += h;
        dn[d] -= h;
        const double fd = (pes.ensemble_potential(up, A) - pes.ensemble_potential(dn, A)) / (2.0 * h);
        CHECK(f[d] == doctest::Approx(-fd).epsilon(1e-8));
    }

    // directional derivative in A along a symmetric direction S is kappa:S / 2
    const Eigen::MatrixXd K = pes.ensemble_curvature(R, A);
    Eigen::MatrixXd raw(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            raw(i, j) = random_vec(1, rng)[0];
    const Eigen::MatrixXd S = 0.5 * (raw + raw.transpose());
    const double fd = (pes.ensemble_potential(R, A + h * S) -
                       pes.ensemble_potential(R, A - h * S)) /
                      (2.0 * h);
    CHECK(fd == doctest::Approx(0.5 * (K.array() * S.array()).sum()).epsilon(1e-8));
}

TEST_CASE("allocation-free variants agree with the validated calls") {
    std::mt19937_64 rng(404);
    const int dim = 5;
    const QuarticPES pes = random_pes(dim, rng);
    const Eigen::VectorXd R = random_vec(dim, rng);
    const Eigen::MatrixXd A = random_spd(dim, rng);
    Eigen::VectorXd f(dim);
    Eigen::MatrixXd K(dim, dim);
    pes.ensemble_force_into(R, A, f);
    pes.ensemble_curvature_into(R, A, K);
    CHECK((f - pes.ensemble_force(R, A)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((K - pes.ensemble_curvature(R, A)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("gaussian argument validation") {
    QuarticPES pes(2);
    pes.phi().set({0, 0}, 1.0);
    pes.phi().set({1, 1}, 1.0);
    const Eigen::VectorXd R = Eigen::VectorXd::Zero(2);
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(2, 2);
    CHECK_NOTHROW(pes.check_gaussian_args(R, A));

    Eigen::MatrixXd bad = A;
    bad(0, 1) = 0.5; // asymmetric
    CHECK_THROWS_AS(pes.check_gaussian_args(R, bad), tdscha::InputError);

    bad = -A; // negative definite
    CHECK_THROWS_AS(pes.check_gaussian_args(R, bad), tdscha::InputError);

    CHECK_THROWS_AS(pes.ensemble_potential(Eigen::VectorXd::Zero(3), A), tdscha::InputError);
}

TEST_CASE("double-well shape set and read back") {
    std::mt19937_64 rng(2024);
    SUBCASE("unit axis direction") {
        QuarticPES pes = random_pes(4, rng);
        Eigen::VectorXd e = Eigen::VectorXd::Unit(4, 2);
        tdscha::set_double_well(pes, e, 1.7, 0.035);
        const auto p = tdscha::double_well_params(pes, e);
        CHECK(p.x0 == doctest::Approx(1.7).epsilon(1e-10));
        CHECK(p.v0 == doctest::Approx(0.035).epsilon(1e-10));

        // section through the full potential has the advertised minima
        QuarticPES bare(1);
        tdscha::set_double_well(bare, Eigen::VectorXd::Ones(1), 1.7, 0.035);
        Eigen::VectorXd x(1);
        x[0] = 1.7;
        CHECK(bare.potential_at(x) == doctest::Approx(-0.035).epsilon(1e-12));
        CHECK(bare.gradient_at(x)[0] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
        x[0] = 0.0;
        CHECK(bare.potential_at(x) == 0.0);
        // grid scan: no point below the advertised depth
        for (int i = 0; i <= 100; ++i) {
            x[0] = -2.5 + 5.0 * i / 100.0;
            CHECK(bare.potential_at(x) >= -0.035 - 1e-12);
        }
    }
    SUBCASE("general direction uses rank-one updates") {
        QuarticPES pes = random_pes(3, rng);
        Eigen::VectorXd e(3);
        e << 1.0, 2.0, -2.0;
        e.normalize();
        tdscha::set_double_well(pes, e, 2.2, 0.09);
        const auto p = tdscha::double_well_params(pes, e);
        CHECK(p.x0 == doctest::Approx(2.2).epsilon(1e-9));
        CHECK(p.v0 == doctest::Approx(0.09).epsilon(1e-9));
    }
    SUBCASE("rejects shapes without a double well") {
        QuarticPES pes(2);
        pes.phi().set({0, 0}, 0.5);
        pes.psi().set({0, 0, 0, 0}, 1.0);
        CHECK_THROWS_AS(tdscha::double_well_params(pes, Eigen::VectorXd::Unit(2, 0)),
                        tdscha::InputError);
        CHECK_THROWS_AS(tdscha::set_double_well(pes, Eigen::VectorXd::Unit(2, 0), -1.0, 0.1),
                        tdscha::InputError);
    }
}
