#include "mhdlab/fields.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace mhd {

namespace {

struct TrigFactor {
    int axis;
    int k;
    bool is_sin;
};

// Accumulate amp * prod_j trig_j(k_j x_{axis_j}) into component c.
void add_trig_product(SpectralField& f, int c, double amp,
                      const std::vector<TrigFactor>& factors) {
    const Grid& g = f.grid();
    const int nf = static_cast<int>(factors.size());
    for (int mask = 0; mask < (1 << nf); ++mask) {
        cd coef{amp, 0.0};
        std::array<int, 3> k{0, 0, 0};
        for (int j = 0; j < nf; ++j) {
            const bool plus = (mask >> j) & 1;
            const TrigFactor& t = factors[j];
            k[t.axis] += plus ? t.k : -t.k;
            if (t.is_sin)
                coef *= plus ? cd{0.0, -0.5} : cd{0.0, 0.5};
            else
                coef *= 0.5;
        }
        for (int a = 0; a < g.dim; ++a)
            if (!g.resolves(a, k[a]))
                throw std::invalid_argument("field generator: grid too coarse");
        f.mode(c, k[0], k[1], g.dim == 3 ? k[2] : 0) += coef;
    }
}

void require_resolution(const Grid& g, int n, int m) {
    if (g.modes[0] < 4 * std::max(1, n) || g.modes[1] < 4 * std::max(1, m))
        throw std::invalid_argument(
            "taylor_field: need >= 4 points per shortest wavelength");
}

// C^inf step from 0 at s<=0 to 1 at s>=1.
double smooth_step(double s) {
    if (s <= 0.0) return 0.0;
    if (s >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    return a / (a + b);
}

double smooth_step_deriv(double s) {
    if (s <= 0.0 || s >= 1.0) return 0.0;
    const double a = std::exp(-1.0 / s);
    const double b = std::exp(-1.0 / (1.0 - s));
    const double da = a / (s * s);
    const double db = -b / ((1.0 - s) * (1.0 - s));
    return (da * (a + b) - a * (da + db)) / ((a + b) * (a + b));
}

SpectralField truncate_to(const SpectralField& fine, const Grid& coarse,
                          double tail_tol) {
    SpectralField out(coarse, fine.ncomp());
    const Grid& gf = fine.grid();
    double kept_max = 0.0, dropped_max = 0.0;
    for (int c = 0; c < fine.ncomp(); ++c) {
        const auto& a = fine.comp(c);
        std::size_t idx = 0;
        for (int i1 = 0; i1 < gf.modes[0]; ++i1)
            for (int i2 = 0; i2 < gf.modes[1]; ++i2)
                for (int i3 = 0; i3 < gf.modes[2]; ++i3, ++idx) {
                    const int k1 = gf.freq(0, i1), k2 = gf.freq(1, i2),
                              k3 = gf.freq(2, i3);
                    const double mag = std::abs(a[idx]);
                    const bool fits = coarse.resolves(0, k1) &&
                                      coarse.resolves(1, k2) &&
                                      (coarse.dim < 3 || coarse.resolves(2, k3));
                    if (fits) {
                        out.mode(c, k1, k2, coarse.dim == 3 ? k3 : 0) = a[idx];
                        kept_max = std::max(kept_max, mag);
                    } else {
                        dropped_max = std::max(dropped_max, mag);
                    }
                }
    }
    if (dropped_max > tail_tol * std::max(kept_max, 1e-300))
        throw std::invalid_argument(
            "shear_pullback: resolution insufficient for sheared spectrum");
    return out;
}

}  // namespace

void TaylorSpec::validate() const {
    if (n < 1 || m < 0) throw std::invalid_argument("TaylorSpec: n >= 1, m >= 0");
    if (family < 1 || family > 4)
        throw std::invalid_argument("TaylorSpec: family in 1..4");
    if (eigenvalue() <= 0.0)
        throw std::invalid_argument("TaylorSpec: eigenvalue must be positive");
}

void BeltramiSpec::validate() const {
    if (frequency == 0)
        throw std::invalid_argument("BeltramiSpec: frequency must be nonzero");
    for (const auto& mode : modes) {
        const long kk = static_cast<long>(mode.k[0]) * mode.k[0] +
                        static_cast<long>(mode.k[1]) * mode.k[1] +
                        static_cast<long>(mode.k[2]) * mode.k[2];
        if (kk != static_cast<long>(frequency) * frequency)
            throw std::invalid_argument("BeltramiSpec: |k| != N0");
        const double dot = mode.k[0] * mode.b[0] + mode.k[1] * mode.b[1] +
                           mode.k[2] * mode.b[2];
        const double scale = std::abs(frequency) *
                             (std::abs(mode.b[0]) + std::abs(mode.b[1]) +
                              std::abs(mode.b[2]));
        if (std::abs(dot) > 1e-12 * std::max(scale, 1e-300))
            throw std::invalid_argument("BeltramiSpec: k not orthogonal to b_k");
    }
}

void ShearSpec::validate() const {
    if (std::abs(eps) >= 1.0) throw std::invalid_argument("ShearSpec: |eps| < 1");
    if (std::gcd(p, q) != 1)
        throw std::invalid_argument("ShearSpec: p, q must be coprime");
}

double ShearSpec::ramp(double x1) const {
    x1 = std::fmod(x1, kTwoPi);
    if (x1 < 0.0) x1 += kTwoPi;
    const double lo = std::numbers::pi + window;
    const double hi = kTwoPi - window;
    return x1 - kTwoPi * smooth_step((x1 - lo) / (hi - lo));
}

double ShearSpec::ramp_deriv(double x1) const {
    x1 = std::fmod(x1, kTwoPi);
    if (x1 < 0.0) x1 += kTwoPi;
    const double lo = std::numbers::pi + window;
    const double hi = kTwoPi - window;
    return 1.0 - kTwoPi * smooth_step_deriv((x1 - lo) / (hi - lo)) / (hi - lo);
}

SpectralField taylor_field(const TaylorSpec& spec, const Grid& grid) {
    spec.validate();
    if (grid.dim != 2) throw std::invalid_argument("taylor_field: 2-D only");
    require_resolution(grid, spec.n, spec.m);
    SpectralField f = SpectralField::vector_field(grid);
    const int n = spec.n, m = spec.m;
    const double A = spec.amplitude;
    if (m == 0) {
        switch (spec.family) {
            case 1: add_trig_product(f, 0, A, {{1, n, true}}); break;
            case 2: add_trig_product(f, 0, A, {{1, n, false}}); break;
            case 3: add_trig_product(f, 1, A, {{0, n, true}}); break;
            case 4: add_trig_product(f, 1, A, {{0, n, false}}); break;
        }
    } else {
        switch (spec.family) {
            case 1:
                add_trig_product(f, 0, A * m, {{0, n, true}, {1, m, false}});
                add_trig_product(f, 1, -A * n, {{0, n, false}, {1, m, true}});
                break;
            case 2:
                add_trig_product(f, 0, A * m, {{0, n, false}, {1, m, true}});
                add_trig_product(f, 1, -A * n, {{0, n, true}, {1, m, false}});
                break;
            case 3:
                add_trig_product(f, 0, A * m, {{0, n, false}, {1, m, false}});
                add_trig_product(f, 1, A * n, {{0, n, true}, {1, m, true}});
                break;
            case 4:
                add_trig_product(f, 0, A * m, {{0, n, true}, {1, m, true}});
                add_trig_product(f, 1, A * n, {{0, n, false}, {1, m, false}});
                break;
        }
    }
    f.set_divergence_free(true);
    f.set_zero_mean(true);
    return f;
}

SpectralField taylor_stream(const TaylorSpec& spec, const Grid& grid) {
    spec.validate();
    if (grid.dim != 2) throw std::invalid_argument("taylor_stream: 2-D only");
    require_resolution(grid, spec.n, spec.m);
    SpectralField psi = SpectralField::scalar_field(grid);
    const int n = spec.n, m = spec.m;
    const double A = spec.amplitude;
    if (m == 0) {
        const double B = A / n;
        switch (spec.family) {
            case 1: add_trig_product(psi, 0, -B, {{1, n, false}}); break;
            case 2: add_trig_product(psi, 0, B, {{1, n, true}}); break;
            case 3: add_trig_product(psi, 0, B, {{0, n, false}}); break;
            case 4: add_trig_product(psi, 0, -B, {{0, n, true}}); break;
        }
    } else {
        switch (spec.family) {
            case 1:
                add_trig_product(psi, 0, A, {{0, n, true}, {1, m, true}});
                break;
            case 2:
                add_trig_product(psi, 0, -A, {{0, n, false}, {1, m, false}});
                break;
            case 3:
                add_trig_product(psi, 0, A, {{0, n, false}, {1, m, true}});
                break;
            case 4:
                add_trig_product(psi, 0, -A, {{0, n, true}, {1, m, false}});
                break;
        }
    }
    psi.set_zero_mean(true);
    return psi;
}

SpectralField stable_taylor_v1(const Grid& grid, double amplitude) {
    if (grid.dim != 2)
        throw std::invalid_argument("stable_taylor_v1: 2-D only");
    SpectralField f = SpectralField::vector_field(grid);
    add_trig_product(f, 0, amplitude, {{1, 1, true}});
    add_trig_product(f, 1, 0.5 * amplitude, {{0, 1, true}});
    f.set_divergence_free(true);
    f.set_zero_mean(true);
    return f;
}

SpectralField beltrami_field(const BeltramiSpec& spec, const Grid& grid) {
    spec.validate();
    if (grid.dim != 3)
        throw std::invalid_argument("beltrami_field: 3-D only");
    SpectralField f = SpectralField::vector_field(grid);
    const double n0 = static_cast<double>(spec.frequency);
    for (const auto& mode : spec.modes) {
        const auto& k = mode.k;
        const auto& b = mode.b;
        const std::array<double, 3> bxk{b[1] * k[2] - b[2] * k[1],
                                        b[2] * k[0] - b[0] * k[2],
                                        b[0] * k[1] - b[1] * k[0]};
        for (int a = 0; a < 3; ++a)
            if (!grid.resolves(a, k[a]))
                throw std::invalid_argument("beltrami_field: grid too coarse");
        for (int c = 0; c < 3; ++c) {
            // b_k cos(k.x) + (b_k x k)/N0 sin(k.x)
            const cd cos_part = 0.5 * spec.amplitude * b[c];
            const cd sin_part = spec.amplitude * (bxk[c] / n0) * cd{0.0, -0.5};
            f.mode(c, k[0], k[1], k[2]) += cos_part + sin_part;
            f.mode(c, -k[0], -k[1], -k[2]) += cos_part - sin_part;
        }
    }
    f.set_divergence_free(true);
    f.set_zero_mean(true);
    return f;
}

BeltramiSpec b0_spec(int n0, double amplitude) {
    BeltramiSpec spec;
    spec.frequency = n0;
    spec.amplitude = amplitude * std::pow(kTwoPi, -1.5);
    spec.modes.push_back({{0, 0, n0}, {0.0, 1.0, 0.0}});
    return spec;
}

SpectralField shear_pullback(const SpectralField& f, const ShearSpec& shear) {
    shear.validate();
    const Grid& g = f.grid();
    if (f.ncomp() != g.dim)
        throw std::invalid_argument("shear_pullback: needs a vector field");
    Grid fine = g.dim == 2 ? Grid(2 * g.modes[0], 2 * g.modes[1])
                           : Grid(2 * g.modes[0], 2 * g.modes[1], 2 * g.modes[2]);
    const Evaluator ev(f);
    std::vector<std::vector<double>> samples(
        g.dim, std::vector<double>(fine.total()));
    std::size_t idx = 0;
    for (int i1 = 0; i1 < fine.modes[0]; ++i1) {
        const double x1 = fine.coord(0, i1);
        for (int i2 = 0; i2 < fine.modes[1]; ++i2) {
            const double x2 = fine.coord(1, i2);
            for (int i3 = 0; i3 < fine.modes[2]; ++i3, ++idx) {
                if (g.dim == 2) {
                    const std::array<double, 3> y{
                        x1, x2 - shear.eps * shear.ramp(x1), 0.0};
                    const auto v = ev.value(y);
                    samples[0][idx] = v[0];
                    samples[1][idx] =
                        shear.eps * shear.ramp_deriv(x1) * v[0] + v[1];
                } else {
                    const double x3 = fine.coord(2, i3);
                    const double phase = shear.p * x1 - shear.q * x2;
                    const double h = std::cos(phase);
                    const double h1 = -shear.p * std::sin(phase);
                    const double h2 = shear.q * std::sin(phase);
                    const std::array<double, 3> y{x1, x2, x3 + shear.eps * h};
                    const auto v = ev.value(y);
                    samples[0][idx] = v[0];
                    samples[1][idx] = v[1];
                    samples[2][idx] = -shear.eps * h1 * v[0] -
                                      shear.eps * h2 * v[1] + v[2];
                }
            }
        }
    }
    SpectralField out =
        truncate_to(to_spectral(samples, fine), g, /*tail_tol=*/1e-6);
    enforce_reality(out);
    out.set_zero_mean(mean_magnitude(out) <= 1e-13 * max_abs_coef(out));
    out.set_divergence_free(divergence_defect(out) <= 1e-10);
    return out;
}

ReconnectionDatum reconnection_datum_2d(double M, int n, int m, int L, double c,
                                        const Grid& grid, bool rescale_to_M) {
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("reconnection_datum_2d: c in (0,1)");
    if (L < 2) throw std::invalid_argument("reconnection_datum_2d: L >= 2");
    if (M <= 0.0) throw std::invalid_argument("reconnection_datum_2d: M > 0");
    const double N = std::sqrt(static_cast<double>(n * n + m * m));
    const double delta = c * M / std::pow(N, L + 1);
    if (delta < 1e-12 * M)
        throw std::invalid_argument(
            "reconnection_datum_2d: delta underflow, L too large at this scale");
    TaylorSpec vn{n, m, 1, M / N};
    SpectralField datum = taylor_field(vn, grid);
    axpy(datum, 1.0, stable_taylor_v1(grid, delta));
    datum.set_divergence_free(true);
    datum.set_zero_mean(true);
    if (rescale_to_M) {
        const double norm = sobolev_norm(datum, 0);
        datum = scaled(datum, M / norm);
        datum.set_divergence_free(true);
        datum.set_zero_mean(true);
    }
    return {std::move(datum), delta};
}

SpectralField random_velocity(const Grid& grid, double R, int r,
                              std::uint64_t seed) {
    if (R < 0.0) throw std::invalid_argument("random_velocity: R >= 0");
    SpectralField f = SpectralField::vector_field(grid);
    f.set_divergence_free(true);
    f.set_zero_mean(true);
    if (R == 0.0) return f;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    const int band = 8;
    const int b1 = std::min(band, grid.modes[0] / 2 - 1);
    const int b2 = std::min(band, grid.modes[1] / 2 - 1);
    const int b3 = grid.dim == 3 ? std::min(band, grid.modes[2] / 2 - 1) : 0;
    for (int k1 = -b1; k1 <= b1; ++k1)
        for (int k2 = -b2; k2 <= b2; ++k2)
            for (int k3 = -b3; k3 <= b3; ++k3) {
                const int kk = k1 * k1 + k2 * k2 + k3 * k3;
                if (kk == 0 || kk > band * band) continue;
                // canonical representative of the +-k pair
                if (k1 < 0 || (k1 == 0 && (k2 < 0 || (k2 == 0 && k3 < 0))))
                    continue;
                // steep spectrum keeps low-order norms dominated by |k| ~ 1
                const double amp = std::pow(1.0 + kk, -3.0);
                for (int c = 0; c < grid.dim; ++c) {
                    const cd z{gauss(rng), gauss(rng)};
                    f.mode(c, k1, k2, k3) = amp * z;
                    f.mode(c, -k1, -k2, -k3) = amp * std::conj(z);
                }
            }
    f = leray_project(f);
    const double norm = sobolev_norm(f, r);
    f = scaled(f, R / norm);
    f.set_divergence_free(true);
    f.set_zero_mean(true);
    return f;
}

}  // namespace mhd
