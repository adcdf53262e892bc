#include "tdscha/sparse_tensor.hpp"

#include "tdscha/errors.hpp"

#include <algorithm>
#include <cmath>

namespace tdscha {

SparseSymTensor::SparseSymTensor(int dim, int order) : dim_(dim), order_(order) {
    if (dim < 1)
        throw InputError("tensor dimension must be positive");
    if (order < 2 || order > 4)
        throw InputError("tensor order must be 2, 3 or 4");
    if (dim > 255)
        throw InputError("tensor dimension too large");
}

std::array<int, 4> SparseSymTensor::canonical(const std::vector<int>& idx) const {
    if (static_cast<int>(idx.size()) != order_)
        throw InputError("multi-index length does not match tensor order");
    std::array<int, 4> key{};
    for (int m = 0; m < order_; ++m) {
        if (idx[m] < 0 || idx[m] >= dim_)
            throw InputError("tensor index out of range");
        key[m] = idx[m];
    }
    std::sort(key.begin(), key.begin() + order_);
    return key;
}

std::uint32_t SparseSymTensor::pack(const std::array<int, 4>& key) {
    return (static_cast<std::uint32_t>(key[0]) << 24) |
           (static_cast<std::uint32_t>(key[1]) << 16) |
           (static_cast<std::uint32_t>(key[2]) << 8) | static_cast<std::uint32_t>(key[3]);
}

std::size_t SparseSymTensor::find(const std::array<int, 4>& key) const {
    const auto it = lookup_.find(pack(key));
    return it == lookup_.end() ? npos : it->second;
}

void SparseSymTensor::insert(const std::array<int, 4>& key, double value) {
    Entry ent;
    ent.idx = key;
    ent.value = value;
    lookup_.emplace(pack(key), entries_.size());
    entries_.push_back(ent);
    std::array<std::uint8_t, 4> p{};
    for (int m = 0; m < order_; ++m)
        p[m] = static_cast<std::uint8_t>(key[m]);
    // distinct permutations of an already sorted tuple
    std::array<std::uint8_t, 4> work = p;
    do {
        perms_.push_back(work);
    } while (std::next_permutation(work.begin(), work.begin() + order_));
    offsets_.push_back(static_cast<std::uint32_t>(perms_.size()));
}

void SparseSymTensor::set(const std::vector<int>& idx, double value) {
    const auto key = canonical(idx);
    const std::size_t e = find(key);
    if (e != npos)
        entries_[e].value = value;
    else
        insert(key, value);
}

void SparseSymTensor::add(const std::vector<int>& idx, double delta) {
    const auto key = canonical(idx);
    const std::size_t e = find(key);
    if (e != npos)
        entries_[e].value += delta;
    else
        insert(key, delta);
}

double SparseSymTensor::get(const std::vector<int>& idx) const {
    const auto key = canonical(idx);
    const std::size_t e = find(key);
    return e == npos ? 0.0 : entries_[e].value;
}

double SparseSymTensor::contract_all(const Eigen::VectorXd& u) const {
    double total = 0.0;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const Entry& ent = entries_[e];
        double prod = 1.0;
        for (int m = 0; m < order_; ++m)
            prod *= u[ent.idx[m]];
        total += static_cast<double>(offsets_[e + 1] - offsets_[e]) * ent.value * prod;
    }
    return total;
}

double SparseSymTensor::contract_all_pair(const Eigen::VectorXd& u,
                                          const Eigen::MatrixXd& A) const {
    double total = 0.0;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = entries_[e].value;
        double acc = 0.0;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            double term = A(p[order_ - 2], p[order_ - 1]);
            for (int m = 0; m < order_ - 2; ++m)
                term *= u[p[m]];
            acc += term;
        }
        total += v * acc;
    }
    return total;
}

double SparseSymTensor::contract_pair_pair(const Eigen::MatrixXd& A) const {
    if (order_ != 4)
        throw InputError("double pair contraction requires an order-4 tensor");
    double total = 0.0;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = entries_[e].value;
        double acc = 0.0;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            acc += A(p[0], p[1]) * A(p[2], p[3]);
        }
        total += v * acc;
    }
    return total;
}

void SparseSymTensor::add_grad(const Eigen::VectorXd& u, Eigen::VectorXd& g,
                               double scale) const {
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = scale * entries_[e].value;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            double prod = 1.0;
            for (int m = 1; m < order_; ++m)
                prod *= u[p[m]];
            g[p[0]] += v * prod;
        }
    }
}

void SparseSymTensor::add_grad_pair(const Eigen::VectorXd& u, const Eigen::MatrixXd& A,
                                    Eigen::VectorXd& g, double scale) const {
    if (order_ < 3)
        throw InputError("gradient with pair contraction requires order >= 3");
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = scale * entries_[e].value;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            double term = A(p[order_ - 2], p[order_ - 1]);
            for (int m = 1; m < order_ - 2; ++m)
                term *= u[p[m]];
            g[p[0]] += v * term;
        }
    }
}

void SparseSymTensor::add_hess(const Eigen::VectorXd& u, Eigen::MatrixXd& H,
                               double scale) const {
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = scale * entries_[e].value;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            double prod = 1.0;
            for (int m = 2; m < order_; ++m)
                prod *= u[p[m]];
            H(p[0], p[1]) += v * prod;
        }
    }
}

void SparseSymTensor::add_hess_pair(const Eigen::MatrixXd& A, Eigen::MatrixXd& H,
                                    double scale) const {
    if (order_ != 4)
        throw InputError("pair-contracted hessian requires an order-4 tensor");
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = scale * entries_[e].value;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            H(p[0], p[1]) += v * A(p[2], p[3]);
        }
    }
}

double SparseSymTensor::project(const Eigen::MatrixXd& rows) const {
    if (rows.rows() != order_ || rows.cols() != dim_)
        throw InputError("projection directions must be order x dim");
    double total = 0.0;
    for (std::size_t e = 0; e < entries_.size(); ++e) {
        const double v = entries_[e].value;
        double acc = 0.0;
        for (std::uint32_t q = offsets_[e]; q < offsets_[e + 1]; ++q) {
            const auto& p = perms_[q];
            double term = 1.0;
            for (int m = 0; m < order_; ++m)
                term *= rows(m, p[m]);
            acc += term;
        }
        total += v * acc;
    }
    return total;
}

void SparseSymTensor::add_rank_one(const Eigen::VectorXd& u, double delta, double prune_tol) {
    if (u.size() != dim_)
        throw InputError("rank-one direction has wrong dimension");
    std::vector<int> idx(order_);
    const auto nonzero = [&](double x) { return std::abs(x) > prune_tol; };
    if (order_ == 2) {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j) {
                const double v = delta * u[i] * u[j];
                if (nonzero(v)) add({i, j}, v);
            }
    } else if (order_ == 3) {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                for (int k = j; k < dim_; ++k) {
                    const double v = delta * u[i] * u[j] * u[k];
                    if (nonzero(v)) add({i, j, k}, v);
                }
    } else {
        for (int i = 0; i < dim_; ++i)
            for (int j = i; j < dim_; ++j)
                for (int k = j; k < dim_; ++k)
                    for (int l = k; l < dim_; ++l) {
                        const double v = delta * u[i] * u[j] * u[k] * u[l];
                        if (nonzero(v)) add({i, j, k, l}, v);
                    }
    }
}

} // namespace tdscha
