#include "doctest.h"

#include "support/oracles.hpp"
#include "tdscha/errors.hpp"
#include "tdscha/mode_basis.hpp"

#include <cmath>

using tdscha::ModeBasis;

TEST_CASE("basis from curvature diagonalizes and sorts") {
    Eigen::MatrixXd kappa(2, 2);
    kappa << 2.0, 0.5, 0.5, 1.0;
    const ModeBasis b = tdscha::basis_from_curvature(kappa);
    REQUIRE(b.n_modes() == 2);
    CHECK(b.freqs[0] < b.freqs[1]); // ascending
    for (int m = 0; m < 2; ++m) {
        const Eigen::VectorXd e = b.mode_vector(m);
        CHECK(e.norm() == doctest::Approx(1.0).epsilon(1e-12));
        const double lam = e.dot(kappa * e);
        CHECK(b.freqs[m] == doctest::Approx(std::sqrt(lam)).epsilon(1e-12));
    }
    CHECK_NOTHROW(b.validate());
    CHECK(b.index_of("anything") == -1); // no labels assigned
}

TEST_CASE("projections agree with explicit contractions") {
    Eigen::MatrixXd kappa(3, 3);
    kappa << 1.5, 0.2, 0.0, 0.2, 0.9, -0.1, 0.0, -0.1, 2.2;
    const ModeBasis b = tdscha::basis_from_curvature(kappa);

    Eigen::VectorXd v(3);
    v << 0.3, -1.0, 0.7;
    Eigen::MatrixXd M(3, 3);
    M << 1, 2, 3, 2, 5, 6, 3, 6, 9;
    for (int mu = 0; mu < 3; ++mu) {
        const Eigen::VectorXd e = b.mode_vector(mu);
        CHECK(tdscha::project_vector(v, b, mu) == doctest::Approx(e.dot(v)).epsilon(1e-12));
        for (int nu = 0; nu < 3; ++nu) {
            const Eigen::VectorXd f = b.mode_vector(nu);
            CHECK(tdscha::project_matrix(M, b, mu, nu) ==
                  doctest::Approx(e.dot(M * f)).epsilon(1e-12));
        }
    }

    tdscha::SparseSymTensor T(3, 3);
    T.set({0, 1, 2}, 0.4);
    T.set({1, 1, 1}, -0.2);
    const oracle::DenseTensor D = oracle::densify(T);
    const Eigen::VectorXd e0 = b.mode_vector(0), e1 = b.mode_vector(1), e2 = b.mode_vector(2);
    double want = 0.0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k)
                want += D.at(i, j, k) * e0[i] * e1[j] * e2[k];
    CHECK(tdscha::project_tensor(T, b, {0, 1, 2}) == doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("validation flags non-orthonormal rows") {
    ModeBasis b;
    b.eigvecs = Eigen::MatrixXd::Identity(2, 2);
    b.eigvecs(1, 0) = 0.4; // no longer orthonormal
    b.freqs = Eigen::VectorXd::Ones(2);
    CHECK_THROWS_AS(b.validate(), tdscha::InputError);
}

TEST_CASE("curvature with nonpositive eigenvalues is rejected") {
    Eigen::MatrixXd kappa(2, 2);
    kappa << 1.0, 0.0, 0.0, -0.2;
    CHECK_THROWS_AS(tdscha::basis_from_curvature(kappa), tdscha::NumericsError);
}
