#include "tdscha/dynamics.hpp"

#include "tdscha/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace tdscha {

namespace {

// flat layout: [R | P | upper(A) | upper(B) | G]
struct Layout {
    int n = 0;
    int nu = 0;
    explicit Layout(int dim) : n(dim), nu(dim * (dim + 1) / 2) {}
    int size() const { return 2 * n + 2 * nu + n * n; }
    int off_p() const { return n; }
    int off_a() const { return 2 * n; }
    int off_b() const { return 2 * n + nu; }
    int off_g() const { return 2 * n + 2 * nu; }
};

void pack_sym(const Eigen::MatrixXd& M, double* dst) {
    int k = 0;
    for (int i = 0; i < M.rows(); ++i)
        for (int j = i; j < M.cols(); ++j)
            dst[k++] = M(i, j);
}

void unpack_sym(const double* src, Eigen::MatrixXd& M) {
    int k = 0;
    for (int i = 0; i < M.rows(); ++i)
        for (int j = i; j < M.cols(); ++j) {
            M(i, j) = src[k];
            M(j, i) = src[k];
            ++k;
        }
}

Eigen::VectorXd pack_state(const GaussianState& s, const Layout& lay) {
    Eigen::VectorXd y(lay.size());
    y.segment(0, lay.n) = s.R;
    y.segment(lay.off_p(), lay.n) = s.P;
    pack_sym(s.A, y.data() + lay.off_a());
    pack_sym(s.B, y.data() + lay.off_b());
    for (int i = 0; i < lay.n; ++i)
        for (int j = 0; j < lay.n; ++j)
            y[lay.off_g() + i * lay.n + j] = s.G(i, j);
    return y;
}

GaussianState unpack_state(const Eigen::VectorXd& y, double t, const Layout& lay) {
    GaussianState s;
    s.t = t;
    s.R = y.segment(0, lay.n);
    s.P = y.segment(lay.off_p(), lay.n);
    s.A.resize(lay.n, lay.n);
    s.B.resize(lay.n, lay.n);
    s.G.resize(lay.n, lay.n);
    unpack_sym(y.data() + lay.off_a(), s.A);
    unpack_sym(y.data() + lay.off_b(), s.B);
    for (int i = 0; i < lay.n; ++i)
        for (int j = 0; j < lay.n; ++j)
            s.G(i, j) = y[lay.off_g() + i * lay.n + j];
    return s;
}

struct FullRhs {
    const QuarticPES& pes;
    const ModeBasis& basis;
    const Pulse* pulse; // null when undriven
    Eigen::VectorXd charges;
    Layout lay;
    // workspace
    mutable Eigen::VectorXd R, P, f;
    mutable Eigen::MatrixXd A, B, G, K, KG;

    FullRhs(const QuarticPES& p, const ModeBasis& b, const Pulse* pu)
        : pes(p), basis(b), pulse(pu), lay(p.dim()) {
        const int n = lay.n;
        R.resize(n);
        P.resize(n);
        f.resize(n);
        A.resize(n, n);
        B.resize(n, n);
        G.resize(n, n);
        K.resize(n, n);
        KG.resize(n, n);
        if (pulse)
            charges = effective_drive_charges(*pulse, basis);
    }

    void operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
        const int n = lay.n;
        R = y.segment(0, n);
        P = y.segment(lay.off_p(), n);
        unpack_sym(y.data() + lay.off_a(), A);
        unpack_sym(y.data() + lay.off_b(), B);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                G(i, j) = y[lay.off_g() + i * n + j];

        pes.ensemble_curvature_into(R, A, K);
        pes.ensemble_force_into(R, A, f);
        if (pulse)
            f += charges * pulse->field(t);

        dy.resize(lay.size());
        dy.segment(0, n) = P;
        dy.segment(lay.off_p(), n) = f;
        int k = lay.off_a();
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                dy[k++] = G(i, j) + G(j, i);
        KG.noalias() = K * G;
        k = lay.off_b();
        for (int i = 0; i < n; ++i)
            for (int j = i; j < n; ++j)
                dy[k++] = -KG(i, j) - KG(j, i);
        KG.noalias() = B - A * K; // reuse buffer for dG
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                dy[lay.off_g() + i * n + j] = KG(i, j);
    }
};

struct FrozenRhs {
    const QuarticPES& pes;
    const ModeBasis& basis;
    const Pulse* pulse;
    Eigen::VectorXd charges;
    const Eigen::MatrixXd& A0;
    mutable Eigen::VectorXd f;

    FrozenRhs(const QuarticPES& p, const ModeBasis& b, const Pulse* pu,
              const Eigen::MatrixXd& a0)
        : pes(p), basis(b), pulse(pu), A0(a0) {
        f.resize(p.dim());
        if (pulse)
            charges = effective_drive_charges(*pulse, basis);
    }

    void operator()(double t, const Eigen::VectorXd& y, Eigen::VectorXd& dy) const {
        const int n = pes.dim();
        pes.ensemble_force_into(y.segment(0, n), A0, f);
        if (pulse)
            f += charges * pulse->field(t);
        dy.resize(2 * n);
        dy.segment(0, n) = y.segment(n, n);
        dy.segment(n, n) = f;
    }
};

ObsRecord make_record(double t, const GaussianState& s, const QuarticPES& pes,
                      const ModeBasis& basis, const std::vector<int>& modes,
                      int target_mode) {
    ObsRecord rec;
    rec.t = t;
    rec.R_mode.reserve(modes.size());
    rec.A_mode.reserve(modes.size());
    rec.B_mode.reserve(modes.size());
    for (int mu : modes) {
        rec.R_mode.push_back(project_vector(s.R, basis, mu));
        rec.A_mode.push_back(project_matrix(s.A, basis, mu, mu));
        rec.B_mode.push_back(project_matrix(s.B, basis, mu, mu));
    }
    const ForceChannels ch = force_decomposition(pes, s.R, s.A, basis, target_mode);
    rec.f_harmonic = ch.harmonic;
    rec.f_anharmonic = ch.anharmonic;
    rec.f_quantum = ch.quantum;
    rec.f_total = ch.total();
    rec.kinetic = 0.5 * (s.P.squaredNorm() + s.B.trace());
    rec.potential = pes.v_ref() + 0.5 * (pes.phi().contract_all(s.R) +
                                         pes.phi().contract_all_pair(s.R, s.A)) +
                    pes.chi().contract_all(s.R) / 6.0 +
                    0.5 * pes.chi().contract_all_pair(s.R, s.A) +
                    pes.psi().contract_all(s.R) / 24.0 +
                    0.25 * pes.psi().contract_all_pair(s.R, s.A) +
                    0.125 * pes.psi().contract_pair_pair(s.A);
    rec.total_energy = rec.kinetic + rec.potential;
    rec.unc_min = uncertainty_products(s, basis).minCoeff();
    return rec;
}

std::vector<int> resolve_obs_modes(const std::vector<int>& requested, int n_modes) {
    if (!requested.empty()) {
        for (int mu : requested)
            if (mu < 0 || mu >= n_modes)
                throw InputError("observed mode index out of range");
        return requested;
    }
    std::vector<int> all(n_modes);
    for (int i = 0; i < n_modes; ++i)
        all[i] = i;
    return all;
}

} // namespace

double signed_log(double v, double v_scale) {
    if (!(v_scale > 0.0))
        throw InputError("signed_log scale must be positive");
    const double s = v < 0.0 ? -1.0 : (v > 0.0 ? 1.0 : 0.0);
    return s * std::log10(1.0 + std::abs(v) / v_scale);
}

ForceChannels force_decomposition(const QuarticPES& pes, const Eigen::VectorXd& R,
                                  const Eigen::MatrixXd& A, const ModeBasis& basis,
                                  int mu) {
    if (R.size() != pes.dim() || A.rows() != pes.dim() || A.cols() != pes.dim())
        throw InputError("state dimension mismatch in force decomposition");
    const int n = pes.dim();
    Eigen::VectorXd gh = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd ga = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd gq = Eigen::VectorXd::Zero(n);
    pes.phi().add_grad(R, gh);
    pes.chi().add_grad(R, ga, 0.5);
    pes.psi().add_grad(R, ga, 1.0 / 6.0);
    pes.chi().add_grad_pair(R, A, gq, 0.5);
    pes.psi().add_grad_pair(R, A, gq, 0.5);
    ForceChannels ch;
    ch.harmonic = -project_vector(gh, basis, mu);
    ch.anharmonic = -project_vector(ga, basis, mu);
    ch.quantum = -project_vector(gq, basis, mu);
    return ch;
}

namespace {

template <class Rhs, class StateOf>
Trajectory run_integration(Rhs& rhs, const QuarticPES& pes, const GaussianState& initial,
                           const ModeBasis& basis, double t_span,
                           const IntegrateOptions& opts, StateOf&& state_of,
                           const std::function<void(double, const Eigen::VectorXd&)>& monitor,
                           const Eigen::VectorXd& y0) {
    if (!(t_span > 0.0))
        throw InputError("integration span must be positive");
    if (!(opts.stride > 0.0))
        throw InputError("output stride must be positive");
    if (opts.target_mode < 0 || opts.target_mode >= basis.n_modes())
        throw InputError("target mode index out of range");

    const std::vector<int> modes = resolve_obs_modes(opts.obs_modes, basis.n_modes());
    Trajectory traj;
    std::size_t n_sampled = 0;
    double t_final = initial.t;
    Eigen::VectorXd y_final = y0;

    auto sample = [&](double t, const Eigen::VectorXd& y) {
        GaussianState s = state_of(t, y);
        traj.obs.push_back(make_record(t, s, pes, basis, modes, opts.target_mode));
        if (opts.snapshot_every > 0 && n_sampled % static_cast<std::size_t>(opts.snapshot_every) == 0)
            traj.snapshots.push_back(std::move(s));
        ++n_sampled;
    };
    auto accept = [&](double t, const Eigen::VectorXd& y) {
        monitor(t, y);
        t_final = t;
        y_final = y;
    };

    traj.stats = rk45_integrate(rhs, initial.t, initial.t + t_span, y0, opts.stride,
                                sample, accept, opts.ode);
    traj.final_state = state_of(t_final, y_final);
    return traj;
}

} // namespace

Trajectory integrate(const QuarticPES& pes, const GaussianState& initial,
                     const ModeBasis& basis, const std::optional<Pulse>& pulse,
                     double t_span, const IntegrateOptions& opts, const UnitSystem& units) {
    (void)units;
    initial.validate(opts.pd_floor);
    if (pes.dim() != initial.dim() || basis.dim() != initial.dim())
        throw InputError("surface, basis and state dimensions must agree");
    if (pulse)
        pulse->validate();

    const Layout lay(pes.dim());
    FullRhs rhs(pes, basis, pulse ? &*pulse : nullptr);
    const Eigen::VectorXd y0 = pack_state(initial, lay);

    Eigen::MatrixXd Amon(lay.n, lay.n);
    double last_good = initial.t;
    auto monitor = [&](double t, const Eigen::VectorXd& y) {
        unpack_sym(y.data() + lay.off_a(), Amon);
        const Eigen::MatrixXd shifted =
            Amon - opts.pd_floor * Eigen::MatrixXd::Identity(lay.n, lay.n);
        Eigen::LLT<Eigen::MatrixXd> llt(shifted);
        if (llt.info() != Eigen::Success) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Amon, Eigen::EigenvaluesOnly);
            std::ostringstream msg;
            msg << "position covariance lost positive definiteness at t = " << t
                << " (min eigenvalue " << es.eigenvalues().minCoeff()
                << ", last good t = " << last_good << ")";
            throw NumericsError(msg.str());
        }
        last_good = t;
    };

    auto state_of = [&](double t, const Eigen::VectorXd& y) { return unpack_state(y, t, lay); };
    return run_integration(rhs, pes, initial, basis, t_span, opts, state_of, monitor, y0);
}

Trajectory integrate_frozen_a(const QuarticPES& pes, const GaussianState& initial,
                              const ModeBasis& basis, const std::optional<Pulse>& pulse,
                              double t_span, const IntegrateOptions& opts,
                              const UnitSystem& units) {
    (void)units;
    initial.validate(opts.pd_floor);
    if (pes.dim() != initial.dim() || basis.dim() != initial.dim())
        throw InputError("surface, basis and state dimensions must agree");
    if (pulse)
        pulse->validate();

    const int n = pes.dim();
    FrozenRhs rhs(pes, basis, pulse ? &*pulse : nullptr, initial.A);
    Eigen::VectorXd y0(2 * n);
    y0.segment(0, n) = initial.R;
    y0.segment(n, n) = initial.P;

    auto monitor = [](double, const Eigen::VectorXd&) {};
    auto state_of = [&](double t, const Eigen::VectorXd& y) {
        GaussianState s = initial;
        s.t = t;
        s.R = y.segment(0, n);
        s.P = y.segment(n, n);
        return s;
    };
    return run_integration(rhs, pes, initial, basis, t_span, opts, state_of, monitor, y0);
}

} // namespace tdscha
