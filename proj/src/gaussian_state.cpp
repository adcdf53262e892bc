#include "tdscha/gaussian_state.hpp"

#include "tdscha/errors.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>

namespace tdscha {

namespace {

void check_sym_pd(const Eigen::MatrixXd& M, const char* what, double pd_floor) {
    const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
    if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1.0e-9 * scale)
        throw InputError(std::string(what) + " is not symmetric");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < pd_floor)
        throw InputError(std::string(what) + " is not positive definite");
}

} // namespace

void GaussianState::validate(double pd_floor) const {
    const int n = dim();
    if (n == 0)
        throw InputError("empty state");
    if (P.size() != n || A.rows() != n || A.cols() != n || B.rows() != n ||
        B.cols() != n || G.rows() != n || G.cols() != n)
        throw InputError("state block dimensions are inconsistent");
    check_sym_pd(A, "position covariance", pd_floor);
    check_sym_pd(B, "momentum covariance", pd_floor);
}

GaussianState make_state(int dim) {
    if (dim < 1)
        throw InputError("state dimension must be positive");
    GaussianState s;
    s.R = Eigen::VectorXd::Zero(dim);
    s.P = Eigen::VectorXd::Zero(dim);
    s.A = Eigen::MatrixXd::Identity(dim, dim);
    s.B = Eigen::MatrixXd::Identity(dim, dim);
    s.G = Eigen::MatrixXd::Zero(dim, dim);
    return s;
}

GaussianState thermal_state(const Eigen::MatrixXd& kappa, double T, const UnitSystem& units) {
    if (kappa.rows() != kappa.cols() || kappa.rows() == 0)
        throw InputError("curvature matrix must be square");
    if (T < 0.0)
        throw InputError("temperature must be nonnegative");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(kappa);
    if (es.info() != Eigen::Success)
        throw NumericsError("curvature eigendecomposition failed");
    const int n = static_cast<int>(kappa.rows());
    const Eigen::VectorXd& ev = es.eigenvalues();
    if (ev.minCoeff() <= 0.0)
        throw NumericsError("unstable curvature: thermal state undefined");
    GaussianState s;
    s.R = Eigen::VectorXd::Zero(n);
    s.P = Eigen::VectorXd::Zero(n);
    s.A = Eigen::MatrixXd::Zero(n, n);
    s.B = Eigen::MatrixXd::Zero(n, n);
    s.G = Eigen::MatrixXd::Zero(n, n);
    const double hbar = units.hbar;
    for (int m = 0; m < n; ++m) {
        const double w = std::sqrt(ev[m]);
        double occ = 0.0;
        if (T > 0.0)
            occ = 1.0 / std::expm1(hbar * w / units.thermal_energy(T));
        const double two_n_plus_1 = 2.0 * occ + 1.0;
        const Eigen::VectorXd e = es.eigenvectors().col(m);
        s.A += (hbar * two_n_plus_1 / (2.0 * w)) * (e * e.transpose());
        s.B += (hbar * w * two_n_plus_1 / 2.0) * (e * e.transpose());
    }
    return s;
}

Eigen::VectorXd uncertainty_products(const GaussianState& s, const ModeBasis& basis) {
    if (basis.dim() != s.dim())
        throw InputError("basis dimension does not match state");
    const Eigen::MatrixXd Gs = 0.5 * (s.G + s.G.transpose());
    Eigen::VectorXd out(basis.n_modes());
    for (int mu = 0; mu < basis.n_modes(); ++mu) {
        const auto e = basis.eigvecs.row(mu);
        const double a = e * s.A * e.transpose();
        const double b = e * s.B * e.transpose();
        const double g = e * Gs * e.transpose();
        out[mu] = a * b - g * g;
    }
    return out;
}

EnergyBreakdown state_energy(const GaussianState& s, const QuarticPES& pes) {
    s.validate();
    if (pes.dim() != s.dim())
        throw InputError("surface dimension does not match state");
    EnergyBreakdown e;
    e.kinetic = 0.5 * (s.P.squaredNorm() + s.B.trace());
    e.potential = pes.ensemble_potential(s.R, s.A);
    e.total = e.kinetic + e.potential;
    return e;
}

} // namespace tdscha
