#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mhdlab/fields.hpp"
#include "mhdlab/solver.hpp"
#include "mhdlab/topology.hpp"

namespace mhd {

struct ScenarioConfig {
    std::string kind;  // reconnect2d, viscous2d, instant2d, instant3d, ...
    double M = 1.0;
    double T = 1.0;
    double nu = 1.0;
    double eta = 1.0;
    int n = 0;  // 0: pick via feasible_parameters
    int m = 0;
    int L = 2;
    double c = 0.1;
    double eps = 0.1;
    int p = 1;
    int q = 1;
    double R = 0.0;  // H^4 size of the random velocity
    std::uint64_t seed = 1;
    int resolution = 0;  // 0: auto
    double dt = 0.0;     // 0: auto
};

struct FeasibleParameters {
    bool feasible = false;
    int n = 0;
    int m = 0;
    double delta = 0.0;
    int resolution = 0;
    double dt = 0.0;
    // H^3 residue of the decayed V_N component after rescaling, relative to
    // the V_1 target; gated at <= 0.05
    double contamination = 0.0;
    std::string violated;
};

// Smallest eigenvalue pair (n, m) whose decay separation makes the
// reconnection gates achievable at the given parameters.
FeasibleParameters feasible_parameters(double M, double T, double eta,
                                       double nu, int L, double c);

struct ScenarioVerdict {
    bool reconnected = false;
    bool inconclusive = false;
    TopologyReport report_t0;
    TopologyReport report_T;
    double closeness = 0.0;  // ||delta^{-1} e^{eta T} b(T) - V_1||_{H^3}
    double delta = 0.0;
    FeasibleParameters params;
    ContinuationReport continuation;
    std::vector<std::pair<double, double>> escalation;  // (nu, closeness)
    std::string note;
};

ScenarioVerdict run_reconnect2d(const ScenarioConfig& cfg);

// Arbitrary-velocity variant: escalates nu (doubling, cap 1e4) until the
// closeness gate passes. Requires nu > 3 eta.
ScenarioVerdict run_viscous2d(const ScenarioConfig& cfg);

struct InstantReport2d {
    bool saddles_found = false;
    bool connected_t0 = false;
    bool broken_t1 = false;
    bool rate_ok = false;
    std::array<double, 2> a0{};
    std::array<double, 2> b0{};
    double gap_t0 = 0.0;
    double t1 = 0.0;
    double measured_rate = 0.0;  // d/dt [psi(A) - psi(B)] at t = 0
    double analytic_rate = 0.0;  // eta (Lap psi0(A) - Lap psi0(B))
    double formula_rate = 0.0;   // -2 eps eta M (1 + cos(eps pi))
    double min_approach_t1 = 0.0;
};

InstantReport2d run_instant2d(const ScenarioConfig& cfg);

struct Instant3dReport {
    SpectralField datum;
    SpectralField first_order;  // eta Lap b0 - (u0.grad)b0 + (b0.grad)u0
    double formula_mismatch = 0.0;  // pullback vs explicit closed form
    double divergence = 0.0;
    double linear_part_mismatch = 0.0;  // vs eta Lap b0 (u0 = 0 check)
    FieldLine resonant_line;
    FieldLine off_resonant_line;
};

Instant3dReport build_instant3d(const ScenarioConfig& cfg);

struct EstimateReport {
    bool pass = false;
    std::vector<double> fitted_rates;  // per Sobolev order H^0..H^3
    double early_rate = 0.0;
    double late_ratio = 0.0;
    double max_energy_residual = 0.0;
    double hr_growth = 0.0;
    NormSeries raw;
    std::string note;
};

// Exponential decay rate of the difference norms; passes at
// rate >= 0.9 min(nu, eta) over at least two e-foldings.
EstimateReport verify_stability_decay(const RunRecord& reference,
                                      const RunRecord& perturbed, double nu,
                                      double eta);

// Large-nu two-term structure of the velocity: early rate ~ nu, late
// amplitude ~ 1/nu (paired run at 2 nu). Requires nu > 3 eta.
EstimateReport verify_velocity_decay(const ScenarioConfig& cfg);

// Energy identity residual plus H^r decay/boundedness. expected_rate > 0
// asserts the fitted H^3 rate within 1%; otherwise asserts boundedness.
EstimateReport verify_energy_and_hr(const RunRecord& run, double nu,
                                    double eta, double expected_rate = 0.0);

}  // namespace mhd
