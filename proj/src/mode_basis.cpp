#include "tdscha/mode_basis.hpp"

#include "tdscha/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tdscha {

Eigen::VectorXd ModeBasis::mode_vector(int mu) const {
    if (mu < 0 || mu >= n_modes())
        throw InputError("mode index out of range");
    return eigvecs.row(mu).transpose();
}

int ModeBasis::index_of(const std::string& label) const {
    for (std::size_t i = 0; i < labels.size(); ++i)
        if (labels[i] == label)
            return static_cast<int>(i);
    return -1;
}

void ModeBasis::validate(double tol) const {
    if (eigvecs.rows() == 0 || eigvecs.cols() == 0)
        throw InputError("empty mode basis");
    const Eigen::MatrixXd gram = eigvecs * eigvecs.transpose();
    const Eigen::MatrixXd dev =
        gram - Eigen::MatrixXd::Identity(n_modes(), n_modes());
    if (dev.cwiseAbs().maxCoeff() > tol)
        throw InputError("mode basis rows are not orthonormal");
    if (freqs.size() != n_modes())
        throw InputError("frequency list does not match mode count");
    if (freqs.size() > 0 && freqs.minCoeff() < 0.0)
        throw InputError("mode frequencies must be nonnegative");
    if (zeff.size() != 0 && zeff.size() != dim())
        throw InputError("effective-charge vector has wrong dimension");
}

ModeBasis basis_from_curvature(const Eigen::MatrixXd& kappa) {
    if (kappa.rows() != kappa.cols() || kappa.rows() == 0)
        throw InputError("curvature matrix must be square");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa);
    if (es.info() != Eigen::Success)
        throw NumericsError("curvature eigendecomposition failed");
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev.minCoeff() < -1.0e-12 * std::max(1.0, std::abs(ev.maxCoeff())))
        throw NumericsError("curvature has unstable directions, no mode basis");
    ModeBasis basis;
    basis.eigvecs = es.eigenvectors().transpose();
    basis.freqs = ev.cwiseMax(0.0).cwiseSqrt();
    return basis;
}

double project_vector(const Eigen::VectorXd& v, const ModeBasis& basis, int mu) {
    if (v.size() != basis.dim())
        throw InputError("vector dimension mismatch in projection");
    return basis.eigvecs.row(mu).dot(v);
}

double project_matrix(const Eigen::MatrixXd& M, const ModeBasis& basis, int mu, int nu) {
    if (M.rows() != basis.dim() || M.cols() != basis.dim())
        throw InputError("matrix dimension mismatch in projection");
    return basis.eigvecs.row(mu) * M * basis.eigvecs.row(nu).transpose();
}

double project_tensor(const SparseSymTensor& T, const ModeBasis& basis,
                      const std::vector<int>& modes) {
    if (static_cast<int>(modes.size()) != T.order())
        throw InputError("mode index count must match tensor order");
    Eigen::MatrixXd rows(T.order(), basis.dim());
    for (int m = 0; m < T.order(); ++m) {
        if (modes[m] < 0 || modes[m] >= basis.n_modes())
            throw InputError("mode index out of range");
        rows.row(m) = basis.eigvecs.row(modes[m]);
    }
    return T.project(rows);
}

} // namespace tdscha
