#include "tdscha/pes.hpp"

#include "tdscha/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tdscha {

QuarticPES::QuarticPES(int dim, Basis basis)
    : dim_(dim), basis_(basis), phi_(dim, 2), chi_(dim, 3), psi_(dim, 4) {}

double QuarticPES::potential_at(const Eigen::VectorXd& u) const {
    if (u.size() != dim_)
        throw InputError("displacement dimension mismatch");
    return v_ref_ + 0.5 * phi_.contract_all(u) + chi_.contract_all(u) / 6.0 +
           psi_.contract_all(u) / 24.0;
}

Eigen::VectorXd QuarticPES::gradient_at(const Eigen::VectorXd& u) const {
    if (u.size() != dim_)
        throw InputError("displacement dimension mismatch");
    Eigen::VectorXd g = Eigen::VectorXd::Zero(dim_);
    phi_.add_grad(u, g);
    chi_.add_grad(u, g, 0.5);
    psi_.add_grad(u, g, 1.0 / 6.0);
    return g;
}

Eigen::MatrixXd QuarticPES::hessian_at(const Eigen::VectorXd& u) const {
    if (u.size() != dim_)
        throw InputError("displacement dimension mismatch");
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(dim_, dim_);
    phi_.add_hess(u, H);
    chi_.add_hess(u, H);
    psi_.add_hess(u, H, 0.5);
    return H;
}

void QuarticPES::check_gaussian_args(const Eigen::VectorXd& R, const Eigen::MatrixXd& A,
                                     double pd_floor) const {
    if (R.size() != dim_ || A.rows() != dim_ || A.cols() != dim_)
        throw InputError("centroid or covariance dimension mismatch");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.transpose()).cwiseAbs().maxCoeff() > 1.0e-9 * scale)
        throw InputError("position covariance is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < pd_floor)
        throw InputError("position covariance is not positive definite");
}

double QuarticPES::ensemble_potential(const Eigen::VectorXd& R,
                                      const Eigen::MatrixXd& A) const {
    check_gaussian_args(R, A);
    double v = v_ref_;
    v += 0.5 * (phi_.contract_all(R) + phi_.contract_all_pair(R, A));
    v += chi_.contract_all(R) / 6.0 + 0.5 * chi_.contract_all_pair(R, A);
    v += psi_.contract_all(R) / 24.0 + 0.25 * psi_.contract_all_pair(R, A) +
         0.125 * psi_.contract_pair_pair(A);
    return v;
}

void QuarticPES::ensemble_force_into(const Eigen::VectorXd& R, const Eigen::MatrixXd& A,
                                     Eigen::VectorXd& f) const {
    f.setZero(dim_);
    phi_.add_grad(R, f);
    chi_.add_grad(R, f, 0.5);
    chi_.add_grad_pair(R, A, f, 0.5);
    psi_.add_grad(R, f, 1.0 / 6.0);
    psi_.add_grad_pair(R, A, f, 0.5);
    f = -f;
}

Eigen::VectorXd QuarticPES::ensemble_force(const Eigen::VectorXd& R,
                                           const Eigen::MatrixXd& A) const {
    check_gaussian_args(R, A);
    Eigen::VectorXd f(dim_);
    ensemble_force_into(R, A, f);
    return f;
}

void QuarticPES::ensemble_curvature_into(const Eigen::VectorXd& R, const Eigen::MatrixXd& A,
                                         Eigen::MatrixXd& K) const {
    K.setZero(dim_, dim_);
    phi_.add_hess(R, K);
    chi_.add_hess(R, K);
    psi_.add_hess(R, K, 0.5);
    psi_.add_hess_pair(A, K, 0.5);
}

Eigen::MatrixXd QuarticPES::ensemble_curvature(const Eigen::VectorXd& R,
                                               const Eigen::MatrixXd& A) const {
    check_gaussian_args(R, A);
    Eigen::MatrixXd K(dim_, dim_);
    ensemble_curvature_into(R, A, K);
    return K;
}

namespace {

bool is_unit_axis(const Eigen::VectorXd& e, int& axis) {
    axis = -1;
    for (int i = 0; i < e.size(); ++i) {
        if (e[i] == 0.0)
            continue;
        if (axis >= 0 || e[i] != 1.0)
            return false;
        axis = i;
    }
    return axis >= 0;
}

} // namespace

DoubleWellParams double_well_params(const QuarticPES& pes, const Eigen::VectorXd& mode_dir) {
    if (mode_dir.size() != pes.dim())
        throw InputError("mode direction dimension mismatch");
    Eigen::MatrixXd rows2(2, pes.dim()), rows4(4, pes.dim());
    rows2.row(0) = mode_dir.transpose();
    rows2.row(1) = mode_dir.transpose();
    for (int m = 0; m < 4; ++m)
        rows4.row(m) = mode_dir.transpose();
    const double phi_mm = pes.phi().project(rows2);
    const double psi_mm = pes.psi().project(rows4);
    if (!(phi_mm < 0.0) || !(psi_mm > 0.0))
        throw InputError("section along mode has no double-well structure");
    DoubleWellParams p;
    p.x0 = std::sqrt(-6.0 * phi_mm / psi_mm);
    p.v0 = 1.5 * phi_mm * phi_mm / psi_mm;
    return p;
}

void set_double_well(QuarticPES& pes, const Eigen::VectorXd& mode_dir, double x0, double v0) {
    if (mode_dir.size() != pes.dim())
        throw InputError("mode direction dimension mismatch");
    if (!(x0 > 0.0) || !(v0 > 0.0))
        throw InputError("double-well parameters must be positive");
    const double phi_target = -4.0 * v0 / (x0 * x0);
    const double psi_target = 24.0 * v0 / (x0 * x0 * x0 * x0);
    int axis = -1;
    if (is_unit_axis(mode_dir, axis)) {
        pes.phi().set({axis, axis}, phi_target);
        pes.psi().set({axis, axis, axis, axis}, psi_target);
        return;
    }
    const auto current = [&pes, &mode_dir]() {
        Eigen::MatrixXd rows2(2, pes.dim()), rows4(4, pes.dim());
        for (int m = 0; m < 2; ++m)
            rows2.row(m) = mode_dir.transpose();
        for (int m = 0; m < 4; ++m)
            rows4.row(m) = mode_dir.transpose();
        return std::pair<double, double>{pes.phi().project(rows2), pes.psi().project(rows4)};
    }();
    pes.phi().add_rank_one(mode_dir, phi_target - current.first);
    pes.psi().add_rank_one(mode_dir, psi_target - current.second);
}

} // namespace tdscha
