#include "tdscha/toy_model.hpp"

#include "tdscha/errors.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace tdscha {

void ToyModelParams::validate() const {
    if (n_bath < 2 || n_bath % 2 != 0)
        throw InputError("bath mode count must be a positive even number");
    if (!(x0 > 0.0) || !(v0 > 0.0))
        throw InputError("soft mode well parameters must be positive");
    if (omega_fe_bare > 0.0) {
        const double derived = 2.0 * std::sqrt(v0) / x0;
        if (std::abs(omega_fe_bare - derived) > 1.0e-6 * derived)
            throw InputError("omega_fe_bare disagrees with the (x0, v0) well");
    }
    if (!(omega_ir > 0.0) || !(omega_afd > 0.0))
        throw InputError("zone-center frequencies must be positive");
    if (!(band_lo > 0.0) || !(band_hi > band_lo))
        throw InputError("bath band must satisfy 0 < lo < hi");
    if (band_hi >= omega_ir)
        throw InputError("bath band must lie below the pumped frequency");
    if (stab_ir < 0.0 || stab_bath < 0.0)
        throw InputError("quartic stabilizers must be nonnegative");
    if (detune < 0.0)
        throw InputError("detuning spread must be nonnegative");
    if (!std::isfinite(chi_ir) || !std::isfinite(chi_fe) || !std::isfinite(beta) ||
        !std::isfinite(zeff_ir) || !std::isfinite(seed_fe))
        throw InputError("toy model couplings must be finite");
}

ToyModelParams default_toy_params(const UnitSystem& units) {
    ToyModelParams p;
    p.n_bath = 12;
    p.x0 = 1.6;
    p.v0 = 1.2e-2;
    p.omega_fe_bare = 2.0 * std::sqrt(p.v0) / p.x0;
    p.omega_ir = units.omega_from_thz(16.0);
    p.omega_afd = units.omega_from_thz(3.0);
    p.band_lo = units.omega_from_thz(2.0);
    p.band_hi = units.omega_from_thz(10.0);
    p.chi_ir = 0.12;
    p.chi_fe = 0.032;
    p.beta = -1.0e-4;
    p.stab_ir = 1.0e-3;
    p.stab_bath = 2.0e-3;
    p.zeff_ir = 0.85;
    p.seed_fe = 1.0e-6;
    p.detune = units.omega_from_thz(0.4);
    p.fe_band_lo = units.omega_from_thz(0.3);
    p.fe_band_hi = units.omega_from_thz(0.5);
    return p;
}

ToyModel build_toy_sto(const ToyModelParams& params, const UnitSystem& units) {
    params.validate();
    const int n_pairs = params.n_bath / 2;
    const int n = 3 + params.n_bath;

    ToyModel model;
    model.params = params;
    model.pes = QuarticPES(n, QuarticPES::Basis::mode);
    QuarticPES& pes = model.pes;

    Eigen::VectorXd fe_dir = Eigen::VectorXd::Zero(n);
    fe_dir[0] = 1.0;
    set_double_well(pes, fe_dir, params.x0, params.v0);
    pes.phi().set({1, 1}, params.omega_ir * params.omega_ir);
    pes.phi().set({2, 2}, params.omega_afd * params.omega_afd);
    if (params.stab_ir > 0.0)
        pes.psi().set({1, 1, 1, 1}, params.stab_ir);
    if (params.beta != 0.0)
        pes.psi().set({0, 0, 1, 1}, params.beta);

    // pair frequencies: pair sums sit at omega_ir plus a seeded detuning so
    // the two-phonon decay stays resonant, while the splittings fan over the
    // upper half of the available room so the intra-pair beats span the
    // ringing frequency of the polar well and can drain it
    std::mt19937_64 rng(params.seed);
    auto uniform = [&rng]() {
        return static_cast<double>(rng() >> 11) * 0x1.0p-53; // [0, 1)
    };
    const double nominal_mid = 0.5 * params.omega_ir;
    const double room =
        std::min(nominal_mid - params.band_lo, params.band_hi - nominal_mid);
    if (!(room > 0.0))
        throw InputError("bath band cannot host pairs summing to the pumped frequency");

    Eigen::VectorXd freqs = Eigen::VectorXd::Zero(n);
    freqs[1] = params.omega_ir;
    freqs[2] = params.omega_afd;
    std::vector<std::string> labels = {"FE", "IR", "AFD"};
    for (int k = 0; k < n_pairs; ++k) {
        const double eps = params.detune * (2.0 * uniform() - 1.0);
        const double mid = 0.5 * (params.omega_ir + eps);
        const double frac = n_pairs > 1 ? static_cast<double>(k) / (n_pairs - 1) : 0.5;
        const double split = room * (0.4 + 0.45 * frac);
        const int a = 3 + 2 * k;
        const int b = a + 1;
        const double wa = mid - split;
        const double wb = mid + split;
        if (wa < params.band_lo || wb > params.band_hi) {
            std::ostringstream msg;
            msg << "bath pair " << k << " leaves the band: " << wa << ", " << wb;
            throw InputError(msg.str());
        }
        freqs[a] = wa;
        freqs[b] = wb;
        pes.phi().set({a, a}, wa * wa);
        pes.phi().set({b, b}, wb * wb);
        if (params.stab_bath > 0.0) {
            pes.psi().set({a, a, a, a}, params.stab_bath);
            pes.psi().set({b, b, b, b}, params.stab_bath);
        }
        if (params.chi_ir != 0.0)
            pes.chi().set({1, a, b}, params.chi_ir);
        if (params.chi_fe != 0.0)
            pes.chi().set({0, a, b}, params.chi_fe);
        labels.push_back("B" + std::to_string(k + 1) + "a");
        labels.push_back("B" + std::to_string(k + 1) + "b");
    }

    model.basis.eigvecs = Eigen::MatrixXd::Identity(n, n);
    model.basis.freqs = freqs;
    model.basis.labels = std::move(labels);
    model.basis.zeff = Eigen::VectorXd::Zero(n);
    model.basis.zeff[1] = params.zeff_ir;
    model.basis.validate();

    // prove the symmetric state is a stable paraelectric before handing the
    // model out
    RelaxOptions ropts;
    ropts.temperature = 0.0;
    try {
        model.ground = scha_relax(pes, Eigen::VectorXd::Zero(n), ropts, units);
    } catch (const NumericsError& e) {
        throw InputError(std::string("paraelectric validation failed: ") + e.what());
    }
    if (!model.ground.converged)
        throw InputError("paraelectric relaxation did not converge");
    const double drift = model.ground.state.R.cwiseAbs().maxCoeff();
    if (drift > 1.0e-6) {
        std::ostringstream msg;
        msg << "symmetric configuration is not stationary, |R| = " << drift;
        throw InputError(msg.str());
    }
    if (params.fe_band_lo > 0.0 || params.fe_band_hi > 0.0) {
        const ModeFrequency mf =
            fe_frequency(pes, fe_dir, 0.0, 0.01 * params.x0, ropts, units);
        model.fe_omega = mf.omega;
        if (!mf.stable || mf.omega < params.fe_band_lo || mf.omega > params.fe_band_hi) {
            std::ostringstream msg;
            msg << "soft mode frequency " << mf.omega << " outside ["
                << params.fe_band_lo << ", " << params.fe_band_hi << "]";
            throw InputError(msg.str());
        }
    }
    return model;
}

GaussianState toy_initial_state(const ToyModel& model) {
    GaussianState s = model.ground.state;
    s.t = 0.0;
    s.R[0] += model.params.seed_fe;
    return s;
}

} // namespace tdscha
