#include "tdscha/scha.hpp"

#include "tdscha/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

namespace tdscha {

namespace {

double coth(double x) { return 1.0 / std::tanh(x); }

// a(omega) = hbar coth(hbar omega / 2 kT) / (2 omega), strictly decreasing
double variance_of_omega(double omega, double kT, double hbar) {
    if (kT <= 0.0)
        return hbar / (2.0 * omega);
    const double x = hbar * omega / (2.0 * kT);
    if (x > 350.0)
        return hbar / (2.0 * omega);
    return hbar * coth(x) / (2.0 * omega);
}

void thermal_from_modes(const Eigen::MatrixXd& evecs, const Eigen::VectorXd& w2,
                        double kT, double hbar, Eigen::MatrixXd* A,
                        Eigen::MatrixXd* B) {
    const int n = static_cast<int>(w2.size());
    Eigen::VectorXd da(n), db(n);
    for (int i = 0; i < n; ++i) {
        const double w = std::sqrt(w2[i]);
        double occ = 0.0;
        if (kT > 0.0)
            occ = 1.0 / std::expm1(hbar * w / kT);
        da[i] = hbar * (2.0 * occ + 1.0) / (2.0 * w);
        db[i] = hbar * w * (2.0 * occ + 1.0) / 2.0;
    }
    if (A)
        A->noalias() = evecs * da.asDiagonal() * evecs.transpose();
    if (B)
        B->noalias() = evecs * db.asDiagonal() * evecs.transpose();
}

Eigen::MatrixXd bootstrap_fluctuations(const QuarticPES& pes, double kT, double hbar) {
    const int n = pes.dim();
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(n, n);
    pes.phi().add_hess(Eigen::VectorXd::Zero(n), H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    Eigen::VectorXd w2 = es.eigenvalues().cwiseAbs().cwiseMax(1.0e-8);
    Eigen::MatrixXd A;
    thermal_from_modes(es.eigenvectors(), w2, kT, hbar, &A, nullptr);
    return A;
}

// Exact self-consistency for one-dimensional models. The fluctuation solves
// a = variance(sqrt(kappa(a))) by global bisection on the monotone mismatch
// a - variance, which stays robust arbitrarily close to the kappa = 0 wall
// where the damped fixed-point map leaves the feasible region entirely.
double solve_variance_scalar(const QuarticPES& pes, const Eigen::VectorXd& R,
                             double a_init, double kT, double hbar) {
    Eigen::MatrixXd Am(1, 1), Km(1, 1);
    auto mismatch = [&](double a) {
        Am(0, 0) = a;
        pes.ensemble_curvature_into(R, Am, Km);
        if (Km(0, 0) <= 0.0)
            return -1.0; // below the positive-curvature wall, so below the root
        return a - variance_of_omega(std::sqrt(Km(0, 0)), kT, hbar);
    };
    double lo = std::max(a_init, 1.0e-10);
    double hi = lo;
    for (int i = 0; mismatch(lo) > 0.0 && i < 2000; ++i)
        lo *= 0.5;
    for (int i = 0; mismatch(hi) <= 0.0 && i < 2000; ++i)
        hi *= 2.0;
    for (int i = 0; i < 200 && hi - lo > 1.0e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mismatch(mid) <= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

Eigen::MatrixXd normalized_clamps(const Eigen::MatrixXd& dirs, int dim) {
    if (dirs.size() == 0)
        return Eigen::MatrixXd(0, dim);
    if (dirs.cols() != dim)
        throw InputError("clamp direction dimension mismatch");
    Eigen::MatrixXd out = dirs;
    for (int r = 0; r < out.rows(); ++r) {
        const double nrm = out.row(r).norm();
        if (nrm < 1.0e-12)
            throw InputError("clamp direction has zero norm");
        out.row(r) /= nrm;
    }
    const Eigen::MatrixXd gram = out * out.transpose();
    if ((gram - Eigen::MatrixXd::Identity(out.rows(), out.rows())).cwiseAbs().maxCoeff() > 1.0e-8)
        throw InputError("clamp directions must be mutually orthogonal");
    return out;
}

} // namespace

double omega_from_variance(double a, double temperature, const UnitSystem& units) {
    if (!(a > 0.0))
        throw InputError("variance must be positive");
    if (temperature < 0.0)
        throw InputError("temperature must be nonnegative");
    const double hbar = units.hbar;
    const double kT = units.thermal_energy(temperature);
    if (kT <= 0.0)
        return hbar / (2.0 * a);
    // bracket: coth >= 1 and coth(x) >= 1/x give two lower bounds on omega
    double lo = std::max(hbar / (2.0 * a), std::sqrt(kT / a));
    if (variance_of_omega(lo, kT, hbar) <= a)
        return lo;
    double hi = 2.0 * lo;
    int guard = 0;
    while (variance_of_omega(hi, kT, hbar) > a) {
        hi *= 2.0;
        if (++guard > 200)
            throw NumericsError("frequency bracket search failed");
    }
    for (int i = 0; i < 200 && (hi - lo) > 1.0e-15 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (variance_of_omega(mid, kT, hbar) > a ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double free_energy(const QuarticPES& pes, const Eigen::VectorXd& R,
                   const Eigen::MatrixXd& A, double temperature,
                   const UnitSystem& units) {
    if (R.size() != pes.dim() || A.rows() != pes.dim() || A.cols() != pes.dim())
        throw InputError("free energy argument dimension mismatch");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A);
    if (es.eigenvalues().minCoeff() <= 0.0)
        throw InputError("fluctuation matrix must be positive definite");

    const double hbar = units.hbar;
    const double kT = units.thermal_energy(temperature);
    double F = pes.ensemble_potential(R, A);
    for (int i = 0; i < pes.dim(); ++i) {
        const double w = omega_from_variance(es.eigenvalues()[i], temperature, units);
        if (kT <= 0.0) {
            F += hbar * w / 4.0;
            continue;
        }
        const double x = hbar * w / kT;
        const double occ = x > 700.0 ? 0.0 : 1.0 / std::expm1(x);
        F += hbar * w / 2.0 + kT * std::log1p(-std::exp(-x)) -
             hbar * w * (2.0 * occ + 1.0) / 4.0;
    }
    return F;
}

RelaxResult scha_relax(const QuarticPES& pes, const Eigen::VectorXd& R0,
                       const RelaxOptions& opts, const UnitSystem& units) {
    const int n = pes.dim();
    if (R0.size() != n)
        throw InputError("initial centroid dimension mismatch");
    if (opts.max_iter < 1 || opts.mix <= 0.0 || opts.mix > 1.0)
        throw InputError("bad relaxation options");
    const Eigen::MatrixXd clamps = normalized_clamps(opts.clamp_dirs, n);
    const Eigen::MatrixXd proj_free =
        Eigen::MatrixXd::Identity(n, n) - clamps.transpose() * clamps;
    const double hbar = units.hbar;
    const double kT = units.thermal_energy(opts.temperature);

    Eigen::VectorXd R = R0;
    Eigen::MatrixXd A = opts.A0 ? *opts.A0 : bootstrap_fluctuations(pes, kT, hbar);
    if (A.rows() != n || A.cols() != n)
        throw InputError("initial fluctuation dimension mismatch");

    Eigen::MatrixXd K(n, n), A_target(n, n), A_prev, r_prev;
    Eigen::VectorXd f(n);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
    double mix = opts.mix;
    double a_res_prev = -1.0;
    int growth = 0;

    RelaxResult res;
    for (int iter = 0; iter < opts.max_iter; ++iter) {
        res.iterations = iter + 1;
        pes.ensemble_curvature_into(R, A, K);
        es.compute(K);
        int inflations = 0;
        while (es.eigenvalues().minCoeff() <= 1.0e-12) {
            if (++inflations > 10)
                throw NumericsError(
                    "ensemble curvature stayed indefinite under fluctuation inflation");
            A *= 2.0;
            pes.ensemble_curvature_into(R, A, K);
            es.compute(K);
        }
        thermal_from_modes(es.eigenvectors(), es.eigenvalues(), kT, hbar, &A_target,
                           nullptr);

        pes.ensemble_force_into(R, A, f);
        const Eigen::VectorXd f_free = proj_free * f;

        const Eigen::MatrixXd dA = A_target - A;
        const double a_res = dA.cwiseAbs().maxCoeff();
        const double f_res = f_free.cwiseAbs().maxCoeff();
        if (a_res <= opts.a_tol && f_res <= opts.f_tol) {
            res.converged = true;
            break;
        }

        if (n == 1) {
            A(0, 0) = solve_variance_scalar(pes, R, A(0, 0), kT, hbar);
        } else {
            // damped fixed-point step with secant acceleration (Anderson depth
            // one); without it the stiff soft-mode direction would need an
            // impractically small damping factor in deep wells. The
            // accelerated matrix is rejected in favor of the plain damped step
            // if it loses positive definiteness.
            Eigen::MatrixXd A_next = A + mix * dA;
            if (r_prev.size() > 0) {
                const Eigen::MatrixXd dr = dA - r_prev;
                const double denom = dr.squaredNorm();
                if (denom > 1.0e-300) {
                    const double theta =
                        std::clamp(dA.cwiseProduct(dr).sum() / denom, -2.0, 2.0);
                    Eigen::MatrixXd cand =
                        A_next - theta * ((A - A_prev) + mix * dr);
                    if (Eigen::LLT<Eigen::MatrixXd>(cand).info() ==
                        Eigen::Success)
                        A_next = std::move(cand);
                }
            }
            growth = (a_res_prev >= 0.0 && a_res > a_res_prev) ? growth + 1 : 0;
            if (growth >= 5) {
                // residual keeps climbing; damp harder and restart the history
                growth = 0;
                mix = std::max(0.5 * mix, 0.01);
                r_prev.resize(0, 0);
                A_prev.resize(0, 0);
                A += mix * dA;
            } else {
                A_prev = A;
                r_prev = dA;
                A = std::move(A_next);
            }
            a_res_prev = a_res;
        }

        // projected Newton step on the centroid; clamp space is padded with
        // identity so the solve stays positive definite
        const Eigen::MatrixXd K_eff =
            proj_free * K * proj_free + clamps.transpose() * clamps;
        Eigen::LLT<Eigen::MatrixXd> llt(K_eff);
        if (llt.info() != Eigen::Success)
            throw NumericsError("projected curvature not positive definite");
        Eigen::VectorXd step = llt.solve(f_free);
        const double len = step.norm();
        if (len > opts.trust_radius)
            step *= opts.trust_radius / len;
        R += step;
    }

    Eigen::MatrixXd B;
    thermal_from_modes(es.eigenvectors(), es.eigenvalues(), kT, hbar, nullptr, &B);
    res.state.t = 0.0;
    res.state.R = R;
    res.state.P = Eigen::VectorXd::Zero(n);
    res.state.A = A;
    res.state.B = B;
    res.state.G = Eigen::MatrixXd::Zero(n, n);
    res.freqs = es.eigenvalues().cwiseSqrt();
    res.free_energy = free_energy(pes, R, A, opts.temperature, units);
    return res;
}

FesCurve clamped_fes(const QuarticPES& pes, const Eigen::VectorXd& dir,
                     const Eigen::VectorXd& values, const RelaxOptions& opts,
                     const UnitSystem& units) {
    const int n = pes.dim();
    if (dir.size() != n)
        throw InputError("scan direction dimension mismatch");
    const double nrm = dir.norm();
    if (nrm < 1.0e-12)
        throw InputError("scan direction has zero norm");
    if (values.size() < 1)
        throw InputError("scan grid is empty");
    const Eigen::VectorXd d = dir / nrm;

    RelaxOptions local = opts;
    local.clamp_dirs.conservativeResize(opts.clamp_dirs.rows() + 1, n);
    if (opts.clamp_dirs.size() > 0)
        local.clamp_dirs.topRows(opts.clamp_dirs.rows()) = opts.clamp_dirs;
    local.clamp_dirs.bottomRows(1) = d.transpose();

    FesCurve curve;
    curve.values = values;
    curve.F.resize(values.size());
    curve.points.reserve(values.size());

    Eigen::VectorXd R = d * values[0];
    for (int k = 0; k < values.size(); ++k) {
        R += (values[k] - d.dot(R)) * d; // pin the clamped projection exactly
        RelaxResult r = scha_relax(pes, R, local, units);
        curve.F[k] = r.free_energy;
        R = r.state.R;
        local.A0 = r.state.A; // warm start the next grid point
        curve.points.push_back(std::move(r));
    }
    return curve;
}

ModeFrequency fe_frequency(const QuarticPES& pes, const Eigen::VectorXd& dir,
                           double center, double h, const RelaxOptions& opts,
                           const UnitSystem& units) {
    if (!(h > 0.0))
        throw InputError("fit spacing must be positive");
    Eigen::VectorXd values(5);
    for (int k = 0; k < 5; ++k)
        values[k] = center + (k - 2) * h;
    const FesCurve curve = clamped_fes(pes, dir, values, opts, units);
    for (const RelaxResult& p : curve.points)
        if (!p.converged)
            throw NumericsError("clamped relaxation did not converge while "
                                "probing the surface curvature");

    // five-point second derivative; exact through quartic profiles, which
    // matters because the surface flattens steeply around a soft minimum
    const Eigen::VectorXd& F = curve.F;
    const double d2 =
        (-F[0] + 16.0 * F[1] - 30.0 * F[2] + 16.0 * F[3] - F[4]) /
        (12.0 * h * h);
    ModeFrequency out;
    out.curvature = 0.5 * d2;
    out.stable = out.curvature > 0.0;
    out.omega = out.stable ? std::sqrt(2.0 * out.curvature)
                           : -std::sqrt(-2.0 * out.curvature);
    return out;
}

PhaseClass classify_region(const QuarticPES& pes, const Eigen::VectorXd& dir,
                           double v_max, int n_scan, const RelaxOptions& opts,
                           const UnitSystem& units) {
    if (!(v_max > 0.0) || n_scan < 5)
        throw InputError("bad classification scan");
    Eigen::VectorXd values(n_scan);
    for (int k = 0; k < n_scan; ++k)
        values[k] = v_max * k / (n_scan - 1.0);
    const FesCurve curve = clamped_fes(pes, dir, values, opts, units);

    PhaseClass out;
    out.F_sym = curve.F[0];
    for (const RelaxResult& p : curve.points)
        out.resolved = out.resolved && p.converged;

    int k_min = -1;
    for (int k = 1; k + 1 < n_scan; ++k)
        if (curve.F[k] <= curve.F[k - 1] && curve.F[k] <= curve.F[k + 1])
            if (k_min < 0 || curve.F[k] < curve.F[k_min])
                k_min = k;

    if (k_min < 0) {
        if (curve.F[n_scan - 1] < curve.F[n_scan - 2]) {
            // still descending at the scan edge; cannot place the minimum
            out.resolved = false;
            out.v_star = values[n_scan - 1];
            out.delta_F = curve.F[n_scan - 1] - out.F_sym;
            out.region = out.delta_F < 0.0 ? Region::ferro_ground : Region::ferro_metastable;
        } else {
            out.region = Region::para_only;
        }
        return out;
    }

    // parabolic refinement through the discrete minimum, then one clamped
    // relaxation at the refined location
    const double h = values[1] - values[0];
    const double num = curve.F[k_min + 1] - curve.F[k_min - 1];
    const double den = curve.F[k_min + 1] - 2.0 * curve.F[k_min] + curve.F[k_min - 1];
    double v_star = values[k_min];
    if (den > 0.0) {
        const double shift = -0.5 * h * num / den;
        if (std::abs(shift) <= h)
            v_star += shift;
    }
    RelaxOptions local = opts;
    local.A0 = curve.points[k_min].state.A;
    Eigen::VectorXd one(1);
    one << v_star;
    const FesCurve refined = clamped_fes(pes, dir, one, local, units);
    out.resolved = out.resolved && refined.points[0].converged;
    out.v_star = v_star;
    out.delta_F = refined.F[0] - out.F_sym;
    out.region = out.delta_F < 0.0 ? Region::ferro_ground : Region::ferro_metastable;
    return out;
}

std::vector<PhaseCell> phase_map(const QuarticPES& base, const Eigen::VectorXd& dir,
                                 const std::vector<double>& x0s,
                                 const std::vector<double>& v0s,
                                 const PhaseMapOptions& opts,
                                 const UnitSystem& units) {
    if (x0s.empty() || v0s.empty())
        throw InputError("phase map grid is empty");
    if (opts.workers < 1)
        throw InputError("worker count must be positive");

    const std::size_t n_cells = x0s.size() * v0s.size();
    std::vector<PhaseCell> cells(n_cells);
    std::atomic<std::size_t> next{0};

    auto work = [&]() {
        for (;;) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= n_cells)
                return;
            const double x0 = x0s[idx / v0s.size()];
            const double v0 = v0s[idx % v0s.size()];
            PhaseCell& cell = cells[idx];
            cell.x0 = x0;
            cell.v0 = v0;
            try {
                QuarticPES pes = base;
                set_double_well(pes, dir, x0, v0);
                RelaxOptions ropts;
                ropts.temperature = opts.temperature;
                const PhaseClass cls =
                    classify_region(pes, dir, 1.6 * x0, opts.n_scan, ropts, units);
                const ModeFrequency mf =
                    fe_frequency(pes, dir, 0.0, 0.01 * x0, ropts, units);
                cell.region = static_cast<int>(cls.region);
                cell.delta_F = cls.delta_F;
                cell.omega_fe = mf.omega;
                const double f_thz = units.omega_to_thz(mf.omega);
                cell.in_band =
                    mf.stable && f_thz >= opts.band_lo_thz && f_thz <= opts.band_hi_thz;
                cell.error_code = cls.resolved ? 0 : 2;
            } catch (const std::exception&) {
                cell.error_code = 3;
            }
        }
    };

    const int n_workers =
        static_cast<int>(std::min<std::size_t>(opts.workers, n_cells));
    if (n_workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (int i = 0; i < n_workers; ++i)
            pool.emplace_back(work);
        for (std::thread& t : pool)
            t.join();
    }
    return cells;
}

} // namespace tdscha
