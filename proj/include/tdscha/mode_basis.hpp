#pragma once

#include "tdscha/sparse_tensor.hpp"

#include <Eigen/Dense>

#include <string>
#include <vector>

namespace tdscha {

// Orthonormal set of mode directions used for observables and couplings.
// Row mu of eigvecs is the direction of mode mu in mass-rescaled coordinates.
// freqs holds nonnegative frequencies of a relaxed equilibrium; unstable bare
// curvatures never appear here, they live in the quadratic tensor only.
struct ModeBasis {
    Eigen::MatrixXd eigvecs;
    Eigen::VectorXd freqs;
    std::vector<std::string> labels;
    Eigen::VectorXd zeff; // mass-rescaled effective charges, empty when absent

    int dim() const { return static_cast<int>(eigvecs.cols()); }
    int n_modes() const { return static_cast<int>(eigvecs.rows()); }
    Eigen::VectorXd mode_vector(int mu) const;
    int index_of(const std::string& label) const; // -1 when missing
    void validate(double tol = 1.0e-9) const;
};

// Basis from a positive-definite curvature matrix; freqs are sqrt(eigenvalues).
ModeBasis basis_from_curvature(const Eigen::MatrixXd& kappa);

double project_vector(const Eigen::VectorXd& v, const ModeBasis& basis, int mu);
double project_matrix(const Eigen::MatrixXd& M, const ModeBasis& basis, int mu, int nu);
// element of the tensor rotated into the basis, at the given mode indices
double project_tensor(const SparseSymTensor& T, const ModeBasis& basis,
                      const std::vector<int>& modes);

} // namespace tdscha
