#include "doctest.h"

#include "support/oracles.hpp"
#include "tdscha/sparse_tensor.hpp"

#include <random>

using tdscha::SparseSymTensor;

namespace {

SparseSymTensor random_tensor(int dim, int order, int nonzeros, std::mt19937_64& rng) {
    SparseSymTensor T(dim, order);
    std::uniform_int_distribution<int> pick(0, dim - 1);
    std::uniform_real_distribution<double> val(-2.0, 2.0);
    for (int e = 0; e < nonzeros; ++e) {
        std::vector<int> idx(order);
        for (int& i : idx)
            i = pick(rng);
        T.set(idx, val(rng));
    }
    return T;
}

Eigen::MatrixXd random_sym(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Eigen::MatrixXd M(dim, dim);
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j)
            M(i, j) = val(rng);
    return 0.5 * (M + M.transpose());
}

Eigen::VectorXd random_vec(int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> val(-1.0, 1.0);
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i)
        v[i] = val(rng);
    return v;
}

} // namespace

TEST_CASE("element access ignores index order and set overwrites") {
    SparseSymTensor T(5, 3);
    T.set({3, 1, 4}, 2.5);
    CHECK(T.get({1, 3, 4}) == 2.5);
    CHECK(T.get({4, 3, 1}) == 2.5);
    CHECK(T.get({0, 0, 0}) == 0.0);
    T.set({4, 1, 3}, -1.0);
    CHECK(T.nonzeros() == 1);
    CHECK(T.get({3, 1, 4}) == -1.0);
    T.add({1, 4, 3}, 0.25);
    CHECK(T.get({3, 1, 4}) == doctest::Approx(-0.75));
    T.clear();
    CHECK(T.nonzeros() == 0);
    CHECK(T.get({3, 1, 4}) == 0.0);
}

TEST_CASE("contractions agree with dense loops on random tensors") {
    std::mt19937_64 rng(7041);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5); // 2..6
        const int order = 2 + static_cast<int>(rng() % 3);
        SparseSymTensor T = random_tensor(dim, order, 1 + static_cast<int>(rng() % 12), rng);
        const oracle::DenseTensor D = oracle::densify(T);
        const Eigen::VectorXd u = random_vec(dim, rng);
        const Eigen::MatrixXd A = random_sym(dim, rng);

        // full contraction with u on every slot
        double full = 0.0;
        if (order == 2) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    full += D.at(i, j) * u[i] * u[j];
        } else if (order == 3) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        full += D.at(i, j, k) * u[i] * u[j] * u[k];
        } else {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            full += D.at(i, j, k, l) * u[i] * u[j] * u[k] * u[l];
        }
        CHECK(T.contract_all(u) == doctest::Approx(full).epsilon(1e-12));

        // one index pair contracted with A
        if (order >= 3) {
            double mixed = 0.0;
            if (order == 3) {
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        for (int k = 0; k < dim; ++k)
                            mixed += D.at(i, j, k) * u[i] * A(j, k);
            } else {
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < dim; ++j)
                        for (int k = 0; k < dim; ++k)
                            for (int l = 0; l < dim; ++l)
                                mixed += D.at(i, j, k, l) * u[i] * u[j] * A(k, l);
            }
            CHECK(T.contract_all_pair(u, A) == doctest::Approx(mixed).epsilon(1e-12));
        }

        if (order == 4) {
            double pairs = 0.0;
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            pairs += D.at(i, j, k, l) * A(i, j) * A(k, l);
            CHECK(T.contract_pair_pair(A) == doctest::Approx(pairs).epsilon(1e-12));
        }
    }
}

TEST_CASE("gradient and hessian accumulators agree with dense loops") {
    std::mt19937_64 rng(9226);
    for (int trial = 0; trial < 20; ++trial) {
        const int dim = 2 + static_cast<int>(rng() % 5);
        const int order = 2 + static_cast<int>(rng() % 3);
        SparseSymTensor T = random_tensor(dim, order, 1 + static_cast<int>(rng() % 12), rng);
        const oracle::DenseTensor D = oracle::densify(T);
        const Eigen::VectorXd u = random_vec(dim, rng);
        const Eigen::MatrixXd A = random_sym(dim, rng);
        const double scale = 0.37;

        Eigen::VectorXd g = Eigen::VectorXd::Zero(dim);
        T.add_grad(u, g, scale);
        for (int d = 0; d < dim; ++d) {
            double want = 0.0;
            if (order == 2) {
                for (int j = 0; j < dim; ++j)
                    want += D.at(d, j) * u[j];
            } else if (order == 3) {
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        want += D.at(d, j, k) * u[j] * u[k];
            } else {
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            want += D.at(d, j, k, l) * u[j] * u[k] * u[l];
            }
            CHECK(g[d] == doctest::Approx(scale * want).epsilon(1e-12));
        }

        if (order >= 3) {
            g.setZero();
            T.add_grad_pair(u, A, g, scale);
            for (int d = 0; d < dim; ++d) {
                double want = 0.0;
                if (order == 3) {
                    for (int j = 0; j < dim; ++j)
                        for (int k = 0; k < dim; ++k)
                            want += D.at(d, j, k) * A(j, k);
                } else {
                    for (int i = 0; i < dim; ++i)
                        for (int j = 0; j < dim; ++j)
                            for (int k = 0; k < dim; ++k)
                                want += D.at(d, i, j, k) * u[i] * A(j, k);
                }
                CHECK(g[d] == doctest::Approx(scale * want).epsilon(1e-12));
            }
        }

        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim, dim);
        T.add_hess(u, H, scale);
        for (int d = 0; d < dim; ++d)
            for (int e = 0; e < dim; ++e) {
                double want = 0.0;
                if (order == 2) {
                    want = D.at(d, e);
                } else if (order == 3) {
                    for (int k = 0; k < dim; ++k)
                        want += D.at(d, e, k) * u[k];
                } else {
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            want += D.at(d, e, k, l) * u[k] * u[l];
                }
                CHECK(H(d, e) == doctest::Approx(scale * want).epsilon(1e-12));
            }

        if (order == 4) {
            H.setZero();
            T.add_hess_pair(A, H, scale);
            for (int d = 0; d < dim; ++d)
                for (int e = 0; e < dim; ++e) {
                    double want = 0.0;
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            want += D.at(d, e, k, l) * A(k, l);
                    CHECK(H(d, e) == doctest::Approx(scale * want).epsilon(1e-12));
                }
        }
    }
}

TEST_CASE("projection onto direction rows matches dense contraction") {
    std::mt19937_64 rng(5150);
    const int dim = 5;
    for (int order = 2; order <= 4; ++order) {
        SparseSymTensor T = random_tensor(dim, order, 10, rng);
        const oracle::DenseTensor D = oracle::densify(T);
        Eigen::MatrixXd rows(order, dim);
        for (int m = 0; m < order; ++m)
            rows.row(m) = random_vec(dim, rng).transpose();

        double want = 0.0;
        if (order == 2) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    want += D.at(i, j) * rows(0, i) * rows(1, j);
        } else if (order == 3) {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        want += D.at(i, j, k) * rows(0, i) * rows(1, j) * rows(2, k);
        } else {
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j)
                    for (int k = 0; k < dim; ++k)
                        for (int l = 0; l < dim; ++l)
                            want += D.at(i, j, k, l) * rows(0, i) * rows(1, j) * rows(2, k) * rows(3, l);
        }
        CHECK(T.project(rows) == doctest::Approx(want).epsilon(1e-11));
    }
}

TEST_CASE("rank-one update adds a symmetric outer power") {
    std::mt19937_64 rng(881);
    const int dim = 4;
    for (int order = 2; order <= 4; ++order) {
        SparseSymTensor T = random_tensor(dim, order, 6, rng);
        const oracle::DenseTensor before = oracle::densify(T);
        const Eigen::VectorXd u = random_vec(dim, rng);
        const double delta = 1.7;
        T.add_rank_one(u, delta);
        const oracle::DenseTensor after = oracle::densify(T);
        for (std::size_t flat = 0; flat < after.v.size(); ++flat) {
            std::size_t rest = flat;
            double outer = 1.0;
            for (int m = 0; m < order; ++m) {
                outer *= u[rest % dim];
                rest /= dim;
            }
            CHECK(after.v[flat] == doctest::Approx(before.v[flat] + delta * outer).epsilon(1e-12));
        }
    }
}
