#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "mhdlab/spectral.hpp"

namespace mhd {

// One of the four product families V^f_{nm} (n >= 1, m >= 1) or, for m == 0,
// the single-axis families V^f_n. Eigenvalue of -Laplace is n^2 + m^2.
struct TaylorSpec {
    int n = 1;
    int m = 1;
    int family = 1;  // 1..4
    double amplitude = 1.0;

    double eigenvalue() const { return static_cast<double>(n * n + m * m); }
    void validate() const;
};

struct BeltramiMode {
    std::array<int, 3> k;
    std::array<double, 3> b;
};

struct BeltramiSpec {
    int frequency = 1;  // nonzero
    std::vector<BeltramiMode> modes;
    double amplitude = 1.0;

    void validate() const;
};

// Volume-preserving shear. 2-D: Phi(x) = (x1, x2 - eps*g(x1)) where g is a
// periodized ramp equal to x1 on the strip x1 in [-window, pi + window] (the
// linear shear of the reference construction) and returning smoothly to
// periodicity outside it. 3-D: Phi(x) = (x1, x2, x3 + eps*cos(p x1 - q x2)).
struct ShearSpec {
    double eps = 0.0;
    int p = 1;
    int q = 1;
    double window = 0.35;  // 2-D strip margin

    void validate() const;
    // 2-D ramp and its derivative.
    double ramp(double x1) const;
    double ramp_deriv(double x1) const;
};

SpectralField taylor_field(const TaylorSpec& spec, const Grid& grid);

// Stream function psi with grad_perp psi = (d2 psi, -d1 psi) = taylor_field.
SpectralField taylor_stream(const TaylorSpec& spec, const Grid& grid);

// The structurally stable field amplitude * (sin x2, 1/2 sin x1).
SpectralField stable_taylor_v1(const Grid& grid, double amplitude = 1.0);

SpectralField beltrami_field(const BeltramiSpec& spec, const Grid& grid);

// (2pi)^{-3/2} M (sin(N0 x3), cos(N0 x3), 0) as a BeltramiSpec.
BeltramiSpec b0_spec(int n0, double amplitude = 1.0);

// (D Phi)^{-1} (f o Phi), computed on a 2x oversampled grid and truncated
// back to the input resolution. Throws if the truncated tail is significant.
SpectralField shear_pullback(const SpectralField& f, const ShearSpec& shear);

struct ReconnectionDatum {
    SpectralField field;  // (M/N) V_N + delta V_1
    double delta = 0.0;
};

ReconnectionDatum reconnection_datum_2d(double M, int n, int m, int L, double c,
                                        const Grid& grid,
                                        bool rescale_to_M = false);

// Band-limited (|k| <= 8) divergence-free random field with
// sobolev_norm(., r) == R, deterministic per seed.
SpectralField random_velocity(const Grid& grid, double R, int r,
                              std::uint64_t seed);

}  // namespace mhd
