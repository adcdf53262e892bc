#pragma once

#include "tdscha/scha.hpp"

#include <cstdint>

namespace tdscha {

// Mode layout of the built model: 0 = FE (soft double well), 1 = IR (pumped),
// 2 = AFD (spectator), then n_bath bath modes in adjacent pairs.  The pumped
// mode couples to each bath pair through a cubic term, the FE mode couples to
// the same pairs, and a cross quartic ties FE to IR.  Cubic couplings among
// the three zone-center modes themselves are absent by construction.
struct ToyModelParams {
    int n_bath = 12;               // even; grouped into n_bath / 2 pairs
    double x0 = 0.0;               // FE well minimum
    double v0 = 0.0;               // FE well depth
    double omega_fe_bare = 0.0;    // 0 = derive sqrt(4 v0) / x0; else must match
    double omega_ir = 0.0;
    double omega_afd = 0.0;
    double band_lo = 0.0;          // bath frequency band
    double band_hi = 0.0;
    double chi_ir = 0.0;           // pump to bath-pair cubic scale
    double chi_fe = 0.0;           // soft mode to bath-pair cubic scale
    double beta = 0.0;             // psi_{FE,FE,IR,IR}
    double stab_ir = 0.0;          // diagonal quartic stabilizers
    double stab_bath = 0.0;
    double zeff_ir = 0.0;          // drive charge on the pumped mode
    double seed_fe = 0.0;          // initial soft mode displacement for dynamics
    double detune = 0.0;           // half width of the pair-sum detuning spread
    std::uint64_t seed = 20240901; // detuning pattern seed
    double fe_band_lo = 0.0;       // soft mode validation band; both 0 = skip
    double fe_band_hi = 0.0;
    void validate() const;
};

// Defaults sized so the symmetric state is a stable quantum paraelectric with
// the soft mode near 0.3 THz and the pumped mode at 16 THz equivalent.
ToyModelParams default_toy_params(const UnitSystem& units);

struct ToyModel {
    QuarticPES pes;
    ModeBasis basis;
    ToyModelParams params;
    RelaxResult ground;   // relaxed symmetric state, validated at construction
    double fe_omega = 0.0; // clamped soft mode frequency; 0 when not validated
    ToyModel() : pes(1) {}
};

// Builds the surface and basis, then proves the symmetric configuration is a
// stable relaxed state at T = 0 (centroid at zero, all frequencies real,
// soft mode inside the validation band when one is given).
ToyModel build_toy_sto(const ToyModelParams& params, const UnitSystem& units);

// Initial state for driven runs: the relaxed symmetric state displaced by
// seed_fe along the soft mode.
GaussianState toy_initial_state(const ToyModel& model);

} // namespace tdscha
