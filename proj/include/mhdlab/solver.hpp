#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "mhdlab/spectral.hpp"

namespace mhd {

enum class Integrator { kIFRK4, kETDRK4 };

struct MhdParams {
    double nu = 1.0;   // viscosity, >= 0
    double eta = 1.0;  // resistivity, > 0
    double dt = 1e-3;
    double t_end = 1.0;
    bool dealias = true;
    Integrator integrator = Integrator::kIFRK4;
    // Diagnostic mode: drop the momentum right-hand side so u follows the
    // pure heat flow (with u0 = 0 the induction equation becomes linear).
    bool freeze_velocity = false;

    void validate() const;
};

// Divergence-free zero-mean pair (u, b) at time t.
struct MhdState {
    double t = 0.0;
    SpectralField u;
    SpectralField b;
};

MhdState make_state(SpectralField u, SpectralField b, double t = 0.0);

// 1/2 (||u||^2 + ||b||^2) in L2.
double total_energy(const MhdState& state);

struct EnergyLedger {
    std::vector<double> times;
    std::vector<double> energy;
    std::vector<double> u_dissipation;  // nu ||grad u||^2
    std::vector<double> b_dissipation;  // eta ||grad b||^2
    std::vector<double> cumulative_dissipation;
    double gamma0 = 0.0;  // 1 + ||u0||^2 + ||b0||^2
};

struct NormSeries {
    int order = 3;  // norms cover H^0..H^order
    std::vector<double> times;
    std::vector<std::vector<double>> u_norms;
    std::vector<std::vector<double>> b_norms;
};

struct RunRecord {
    std::vector<MhdState> snapshots;
    EnergyLedger ledger;
    NormSeries norms;
    double dt_base = 0.0;
    std::size_t steps = 0;
};

// One step of size dt. Throws on a CFL violation (message reports the
// required dt) and aborts on non-finite coefficients.
void step(MhdState& state, const MhdParams& params, double dt);

// Advance to params.t_end, recording norms every step and states at the
// requested times (dt shrinks to land on them exactly). Deterministic.
RunRecord evolve(MhdState state, const MhdParams& params,
                 const std::vector<double>& snapshot_times,
                 int norm_order = 3);

struct ResidualSeries {
    std::vector<double> times;
    std::vector<double> residuals;
    double max_residual = 0.0;
};

// |dE/dt + nu||grad u||^2 + eta||grad b||^2| with centered differencing.
ResidualSeries energy_identity_residual(const EnergyLedger& ledger);

// P = inv_laplacian( div( (b.grad)b - (u.grad)u ) ), zero-mean gauge.
SpectralField recover_pressure(const MhdState& state);

struct DuhamelSeries {
    std::vector<double> times;
    std::vector<double> linear_norm;     // ||e^{eta t Lap} h0||_{H^r}
    std::vector<double> remainder_norm;  // ||b - reference - linear||_{H^r}
};

// Splits b(t) - reference(t) into the free heat evolution of h0 plus the
// Duhamel remainder D; reference_b0 must decay by the heat flow alone.
DuhamelSeries duhamel_decompose(const RunRecord& run, const SpectralField& h0,
                                const SpectralField& reference_b0, double eta,
                                int r);

// Per-time H^0..H^r norms of u_A - u_B and b_A - b_B.
NormSeries difference_norms(const RunRecord& a, const RunRecord& b, int r);

// Max deviation of g = d_t psi + u.grad psi - eta Lap psi from its spatial
// mean, with d_t psi taken from the instantaneous induction right-hand side.
double induction_gauge_residual(const MhdState& state, const MhdParams& params);

}  // namespace mhd
