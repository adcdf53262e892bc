#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace tdscha {

// Fully symmetric tensor of order 2, 3 or 4 stored sparsely: one entry per
// ascending multi-index, holding the value of the symmetric element itself.
// Contractions walk the distinct index permutations of each entry so that
// every element of the equivalent dense tensor is visited exactly once.
class SparseSymTensor {
public:
    struct Entry {
        std::array<int, 4> idx{}; // first `order` slots used, ascending
        double value = 0.0;
    };

    SparseSymTensor() = default;
    SparseSymTensor(int dim, int order);

    int dim() const { return dim_; }
    int order() const { return order_; }
    std::size_t nonzeros() const { return entries_.size(); }
    const std::vector<Entry>& entries() const { return entries_; }

    // Sets (or overwrites) the symmetric element at the given multi-index;
    // index order is irrelevant.
    void set(const std::vector<int>& idx, double value);
    void add(const std::vector<int>& idx, double delta);
    double get(const std::vector<int>& idx) const;
    void clear() {
        entries_.clear();
        perms_.clear();
        offsets_.assign(1, 0);
        lookup_.clear();
    }

    // sum_{dense} T u...u  (no Taylor 1/k! factor)
    double contract_all(const Eigen::VectorXd& u) const;
    // sum_{dense} T_{...jk} u... A_jk  with one index pair contracted by A
    double contract_all_pair(const Eigen::VectorXd& u, const Eigen::MatrixXd& A) const;
    // order 4 only: sum T_{ijkl} A_ij A_kl
    double contract_pair_pair(const Eigen::MatrixXd& A) const;

    // g_d = sum T_{d,rest} u_rest
    void add_grad(const Eigen::VectorXd& u, Eigen::VectorXd& g, double scale = 1.0) const;
    // g_d = sum T_{d,...,jk} u... A_jk (order 3: T_{d,jk} A_jk; order 4: T_{d,i,jk} u_i A_jk)
    void add_grad_pair(const Eigen::VectorXd& u, const Eigen::MatrixXd& A,
                       Eigen::VectorXd& g, double scale = 1.0) const;
    // H_de += scale * sum T_{d,e,rest} u_rest
    void add_hess(const Eigen::VectorXd& u, Eigen::MatrixXd& H, double scale = 1.0) const;
    // order 4 only: H_de += scale * sum T_{d,e,kl} A_kl
    void add_hess_pair(const Eigen::MatrixXd& A, Eigen::MatrixXd& H, double scale = 1.0) const;

    // Symmetric element in the rotated frame: sum_dense T_{ij..} e0_i e1_j ..
    // where rows.row(m) is the m-th direction.
    double project(const Eigen::MatrixXd& rows) const;

    // Adds delta * (u x u x ... x u) as a symmetric rank-one update.
    void add_rank_one(const Eigen::VectorXd& u, double delta, double prune_tol = 0.0);

private:
    int dim_ = 0;
    int order_ = 0;
    std::vector<Entry> entries_;
    // flat list of distinct permutations, entry e owns perms_[offsets_[e] .. offsets_[e+1])
    std::vector<std::array<std::uint8_t, 4>> perms_;
    std::vector<std::uint32_t> offsets_{0};
    std::unordered_map<std::uint32_t, std::size_t> lookup_;

    std::array<int, 4> canonical(const std::vector<int>& idx) const;
    static std::uint32_t pack(const std::array<int, 4>& key);
    std::size_t find(const std::array<int, 4>& key) const; // npos when absent
    void insert(const std::array<int, 4>& key, double value);
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);
};

} // namespace tdscha
