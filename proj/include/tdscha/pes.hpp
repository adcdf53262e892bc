#pragma once

#include "tdscha/sparse_tensor.hpp"

#include <Eigen/Dense>

#include <string>

namespace tdscha {

// Potential-energy surface truncated at fourth order around a stationary
// reference point (no linear term):
//   V(u) = v_ref + 1/2 phi_ij u_i u_j + 1/3! chi_ijk u_i u_j u_k
//        + 1/4! psi_ijkl u_i u_j u_k u_l
// in mass-rescaled coordinates.  Expectation values over a Gaussian density
// with centroid R and position covariance A close in this family, which is
// what makes the self-consistent dynamics exact here.
class QuarticPES {
public:
    enum class Basis { cartesian, mode };

    QuarticPES() = default;
    explicit QuarticPES(int dim, Basis basis = Basis::cartesian);

    int dim() const { return dim_; }
    Basis basis() const { return basis_; }
    void set_basis(Basis b) { basis_ = b; }
    double v_ref() const { return v_ref_; }
    void set_v_ref(double v) { v_ref_ = v; }

    SparseSymTensor& phi() { return phi_; }
    SparseSymTensor& chi() { return chi_; }
    SparseSymTensor& psi() { return psi_; }
    const SparseSymTensor& phi() const { return phi_; }
    const SparseSymTensor& chi() const { return chi_; }
    const SparseSymTensor& psi() const { return psi_; }

    // point evaluations
    double potential_at(const Eigen::VectorXd& u) const;
    Eigen::VectorXd gradient_at(const Eigen::VectorXd& u) const;
    Eigen::MatrixXd hessian_at(const Eigen::VectorXd& u) const;

    // Gaussian ensemble averages; closed under Wick contractions.
    // <V> = v_ref + 1/2 phi:(RR + A) + 1/6 chi:(RRR + 3 RA) + 1/24 psi:(RRRR + 6 RRA + 3 AA)
    double ensemble_potential(const Eigen::VectorXd& R, const Eigen::MatrixXd& A) const;
    // <f>_i = -[phi R + 1/2 chi:(RR + A) + 1/6 psi:RRR + 1/2 psi:(R,A)]_i = -d<V>/dR_i
    Eigen::VectorXd ensemble_force(const Eigen::VectorXd& R, const Eigen::MatrixXd& A) const;
    // kappa_ij = phi + chi.R + 1/2 psi:(RR + A) = 2 d<V>/dA_ij
    Eigen::MatrixXd ensemble_curvature(const Eigen::VectorXd& R, const Eigen::MatrixXd& A) const;

    // allocation-free variants without argument validation (integrator path)
    void ensemble_force_into(const Eigen::VectorXd& R, const Eigen::MatrixXd& A,
                             Eigen::VectorXd& f) const;
    void ensemble_curvature_into(const Eigen::VectorXd& R, const Eigen::MatrixXd& A,
                                 Eigen::MatrixXd& K) const;

    // Throws when A is not symmetric positive definite (floor on the smallest
    // eigenvalue, absolute, in natural units).
    void check_gaussian_args(const Eigen::VectorXd& R, const Eigen::MatrixXd& A,
                             double pd_floor = 1.0e-12) const;

private:
    int dim_ = 0;
    Basis basis_ = Basis::cartesian;
    double v_ref_ = 0.0;
    SparseSymTensor phi_, chi_, psi_;
};

struct DoubleWellParams {
    double x0 = 0.0; // well minimum along the mode, mass-rescaled length
    double v0 = 0.0; // well depth below the saddle at the origin
};

// Reads the double-well shape of the quartic section along the direction e:
// x0 = sqrt(-6 phi_mm / psi_mmmm), V0 = 3 phi_mm^2 / (2 psi_mmmm).
// Requires phi_mm < 0 and psi_mmmm > 0.
DoubleWellParams double_well_params(const QuarticPES& pes, const Eigen::VectorXd& mode_dir);

// Adjusts the diagonal quadratic and quartic elements along the direction e so
// that the section has minima at +-x0 of depth V0: phi_mm = -4 V0 / x0^2,
// psi_mmmm = 24 V0 / x0^4.  Unit directions edit elements in place; general
// directions apply symmetric rank-one updates.  Other elements are untouched.
void set_double_well(QuarticPES& pes, const Eigen::VectorXd& mode_dir, double x0, double v0);

} // namespace tdscha
