#include "mhdlab/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

namespace mhd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kClosenessGate = 0.1;
constexpr double kContaminationGate = 0.05;
constexpr double kViscosityCap = 1e4;

int auto_resolution(int n, int m) { return std::max(32, 8 * std::max(n, m)); }

// Base step for evolve; the integrator clamps to the CFL bound per step.
double auto_dt(double T) { return std::min(5e-3, T / 10.0); }

// ||(M/N) V_N||_{H^3} for the unit-energy-slope normalization M/N.
double vn_h3_norm(double M, int n2) {
    const double s = static_cast<double>(n2);
    return M * kPi * std::sqrt(1.0 + s + s * s + s * s * s);
}

SpectralField restrict_modes(const SpectralField& fine, const Grid& coarse) {
    SpectralField out(coarse, fine.ncomp());
    const Grid& gf = fine.grid();
    for (int c = 0; c < fine.ncomp(); ++c) {
        const auto& a = fine.comp(c);
        std::size_t idx = 0;
        for (int i1 = 0; i1 < gf.modes[0]; ++i1)
            for (int i2 = 0; i2 < gf.modes[1]; ++i2)
                for (int i3 = 0; i3 < gf.modes[2]; ++i3, ++idx) {
                    const int k1 = gf.freq(0, i1), k2 = gf.freq(1, i2),
                              k3 = gf.freq(2, i3);
                    if (coarse.resolves(0, k1) && coarse.resolves(1, k2) &&
                        (coarse.dim < 3 || coarse.resolves(2, k3)))
                        out.mode(c, k1, k2, coarse.dim == 3 ? k3 : 0) = a[idx];
                }
    }
    return out;
}

// Drop numerically negligible modes so point evaluation stays sparse.
SpectralField dominant_part(const SpectralField& f, double rel = 1e-12) {
    SpectralField out = f;
    const double cut = rel * max_abs_coef(f);
    for (int c = 0; c < out.ncomp(); ++c)
        for (auto& z : out.comp(c))
            if (std::abs(z) < cut) z = cd{0.0, 0.0};
    return out;
}

// sum_a u_a d_a f with 2/3-truncated physical products.
SpectralField advect(const SpectralField& u, const SpectralField& f) {
    const Grid& g = f.grid();
    if (u.grid() != g) throw std::invalid_argument("advect: grid mismatch");
    SpectralField ut = u, ft = f;
    dealias(ut);
    dealias(ft);
    const auto us = to_physical(ut);
    std::vector<std::vector<double>> acc(f.ncomp(),
                                         std::vector<double>(g.total(), 0.0));
    for (int a = 0; a < g.dim; ++a) {
        const auto ds = to_physical(differentiate(ft, a, 1));
        for (int c = 0; c < f.ncomp(); ++c)
            for (std::size_t i = 0; i < acc[c].size(); ++i)
                acc[c][i] += us[a][i] * ds[c][i];
    }
    SpectralField out = to_spectral(acc, g);
    dealias(out);
    return out;
}

// Least-squares slope of -log y over t in [t0, t1]; NaN when underdetermined.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& y,
                      double t0, double t1) {
    double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
    int count = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t0 - 1e-15 || t[i] > t1 + 1e-15) continue;
        if (!(y[i] > 0.0)) continue;
        const double ly = std::log(y[i]);
        st += t[i];
        sy += ly;
        stt += t[i] * t[i];
        sty += t[i] * ly;
        ++count;
    }
    if (count < 3) return std::numeric_limits<double>::quiet_NaN();
    const double denom = count * stt - st * st;
    if (std::abs(denom) < 1e-300)
        return std::numeric_limits<double>::quiet_NaN();
    return -(count * sty - st * sy) / denom;
}

double torus_dist2(const std::array<double, 2>& a,
                   const std::array<double, 2>& b) {
    const double d0 = std::remainder(a[0] - b[0], kTwoPi);
    const double d1 = std::remainder(a[1] - b[1], kTwoPi);
    return d0 * d0 + d1 * d1;
}

// Index of the critical point of the given kind nearest to the seed.
int nearest_point(const std::vector<CriticalPoint>& pts,
                  const std::array<double, 2>& seed, PointKind kind,
                  double max_dist) {
    int best = -1;
    double best_d2 = max_dist * max_dist;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (pts[i].kind != kind) continue;
        const double d2 = torus_dist2(pts[i].position, seed);
        if (d2 < best_d2) {
            best_d2 = d2;
            best = static_cast<int>(i);
        }
    }
    return best;
}

void fill_pair(FeasibleParameters& fp, double M, double T, double eta, int L,
               double c, int n, int m) {
    const int n2 = n * n + m * m;
    const double N = std::sqrt(static_cast<double>(n2));
    fp.n = n;
    fp.m = m;
    fp.delta = c * M / std::pow(N, L + 1);
    fp.contamination = std::exp(-eta * (n2 - 1) * T) * vn_h3_norm(M, n2) /
                       fp.delta;
    fp.resolution = auto_resolution(n, m);
    fp.dt = auto_dt(T);
    fp.feasible = fp.contamination <= kContaminationGate;
}

}  // namespace

FeasibleParameters feasible_parameters(double M, double T, double eta,
                                       double nu, int L, double c) {
    if (M <= 0.0) throw std::invalid_argument("feasible_parameters: M > 0");
    if (T < 0.0) throw std::invalid_argument("feasible_parameters: T >= 0");
    if (eta <= 0.0 || nu <= 0.0)
        throw std::invalid_argument("feasible_parameters: nu, eta > 0");
    if (L < 2) throw std::invalid_argument("feasible_parameters: L >= 2");
    if (!(c > 0.0 && c < 1.0))
        throw std::invalid_argument("feasible_parameters: c in (0,1)");

    std::vector<std::pair<int, int>> pairs;
    for (int n = 1; n <= 8; ++n)
        for (int m = 1; m <= 8; ++m) pairs.emplace_back(n, m);
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
        const int ea = a.first * a.first + a.second * a.second;
        const int eb = b.first * b.first + b.second * b.second;
        return ea != eb ? ea < eb : a < b;
    });

    FeasibleParameters best;
    best.contamination = std::numeric_limits<double>::infinity();
    for (const auto& [n, m] : pairs) {
        FeasibleParameters fp;
        fill_pair(fp, M, T, eta, L, c, n, m);
        if (fp.feasible) return fp;
        if (fp.contamination < best.contamination) best = fp;
    }
    best.feasible = false;
    best.violated = "contamination";
    return best;
}

ScenarioVerdict run_reconnect2d(const ScenarioConfig& cfg) {
    if (cfg.M <= 0.0) throw std::invalid_argument("reconnect2d: M > 0");
    if (cfg.T <= 0.0) throw std::invalid_argument("reconnect2d: T > 0");
    if (cfg.eta <= 0.0 || cfg.nu <= 0.0)
        throw std::invalid_argument("reconnect2d: nu, eta > 0");
    if (cfg.L < 2) throw std::invalid_argument("reconnect2d: L >= 2");
    if (cfg.c < 0.0 || cfg.c >= 1.0)
        throw std::invalid_argument("reconnect2d: c in [0,1)");

    ScenarioVerdict v;
    if (cfg.n > 0 && cfg.m > 0) {
        fill_pair(v.params, cfg.M, cfg.T, cfg.eta, cfg.L,
                  cfg.c > 0.0 ? cfg.c : 0.1, cfg.n, cfg.m);
    } else {
        v.params = feasible_parameters(cfg.M, cfg.T, cfg.eta, cfg.nu, cfg.L,
                                       cfg.c > 0.0 ? cfg.c : 0.1);
        if (!v.params.feasible) {
            v.inconclusive = true;
            v.note = "no admissible (n, m): " + v.params.violated;
            return v;
        }
    }
    const int n = v.params.n, m = v.params.m;
    const double N = std::sqrt(static_cast<double>(n * n + m * m));
    const int res = cfg.resolution > 0 ? cfg.resolution : v.params.resolution;
    const Grid grid(res, res);

    SpectralField b0 = SpectralField::vector_field(grid);
    if (cfg.c > 0.0) {
        ReconnectionDatum datum =
            reconnection_datum_2d(cfg.M, n, m, cfg.L, cfg.c, grid);
        b0 = std::move(datum.field);
        v.delta = datum.delta;
    } else {
        b0 = taylor_field({n, m, 1, cfg.M / N}, grid);
        v.delta = 0.0;
        v.note = "c = 0: pure eigenfield decay, no reconnection expected";
    }
    v.params.delta = v.delta;

    v.continuation = continue_critical_points({n, m, 1, cfg.M / N}, b0, cfg.L);
    v.report_t0 = topology_report(dominant_part(b0));

    SpectralField u0 = random_velocity(grid, cfg.R, 3, cfg.seed);
    MhdParams params;
    params.nu = cfg.nu;
    params.eta = cfg.eta;
    params.dt = cfg.dt > 0.0 ? cfg.dt : auto_dt(cfg.T);
    params.t_end = cfg.T;
    const RunRecord run =
        evolve(make_state(std::move(u0), b0), params, {0.0, cfg.T});
    const SpectralField& bT = run.snapshots.back().b;

    const SpectralField target = stable_taylor_v1(grid);
    SpectralField rescaled =
        v.delta > 0.0 ? scaled(bT, std::exp(cfg.eta * cfg.T) / v.delta) : bT;
    axpy(rescaled, -1.0, target);
    v.closeness = sobolev_norm(rescaled, 3);

    v.report_T = topology_report(dominant_part(bT));

    const int lattice = 4 * n * m;
    v.reconnected = v.delta > 0.0 && !v.continuation.any_lost &&
                    v.closeness <= kClosenessGate &&
                    v.report_t0.n_saddles == lattice &&
                    v.report_t0.n_centers == lattice &&
                    v.report_t0.n_degenerate == 0 &&
                    v.report_T.n_saddles == 2 && v.report_T.n_centers == 2 &&
                    v.report_T.n_degenerate == 0 &&
                    v.report_T.n_heteroclinic == 0 &&
                    !reports_equivalent(v.report_t0, v.report_T);
    return v;
}

ScenarioVerdict run_viscous2d(const ScenarioConfig& cfg) {
    if (cfg.nu <= 3.0 * cfg.eta)
        throw std::invalid_argument("viscous2d: requires nu > 3 eta");
    std::vector<std::pair<double, double>> escalation;
    ScenarioConfig attempt = cfg;
    ScenarioVerdict v;
    for (double nu = cfg.nu; nu <= kViscosityCap; nu *= 2.0) {
        attempt.nu = nu;
        v = run_reconnect2d(attempt);
        escalation.emplace_back(nu, v.closeness);
        if (v.reconnected) {
            v.escalation = std::move(escalation);
            return v;
        }
    }
    v.escalation = std::move(escalation);
    v.inconclusive = true;
    v.note = "viscosity escalation cap reached";
    return v;
}

InstantReport2d run_instant2d(const ScenarioConfig& cfg) {
    if (!(cfg.eps >= 0.0 && cfg.eps < 1.0))
        throw std::invalid_argument("instant2d: eps in [0,1)");
    if (cfg.M <= 0.0) throw std::invalid_argument("instant2d: M > 0");
    if (cfg.eta <= 0.0 || cfg.nu <= 0.0)
        throw std::invalid_argument("instant2d: nu, eta > 0");
    const int res = cfg.resolution > 0 ? cfg.resolution : 256;
    const Grid grid(res, res);

    // Stream psi0 = M sin x1 cos(x2 - eps g(x1)); g(x1) = x1 on the strip
    // containing both saddles.
    const SpectralField base = taylor_field({1, 1, 4, -cfg.M}, grid);
    const ShearSpec shear{cfg.eps, 1, 1};
    const SpectralField datum = shear_pullback(base, shear);

    InstantReport2d rep;
    rep.t1 = cfg.eta > 0.0 ? 0.1 * cfg.eta : 0.0;
    if (cfg.dt > 0.0) rep.t1 = std::max(rep.t1, 4.0 * cfg.dt);

    const std::array<double, 2> seed_a{0.0, kPi / 2.0};
    const std::array<double, 2> seed_b{kPi, kPi / 2.0 + cfg.eps * kPi};

    const auto locate = [&](const SpectralField& b,
                            std::array<double, 2>& a_pos,
                            std::array<double, 2>& b_pos,
                            std::vector<CriticalPoint>* saddles) {
        const auto pts = find_critical_points(b);
        const int ia = nearest_point(pts, seed_a, PointKind::kSaddle, 0.3);
        const int ib = nearest_point(pts, seed_b, PointKind::kSaddle, 0.3);
        if (ia < 0 || ib < 0 || ia == ib) return false;
        a_pos = pts[ia].position;
        b_pos = pts[ib].position;
        if (saddles) {
            saddles->push_back(pts[ia]);
            saddles->push_back(pts[ib]);
        }
        return true;
    };

    std::vector<CriticalPoint> saddles0;
    rep.saddles_found = locate(datum, rep.a0, rep.b0, &saddles0);
    if (!rep.saddles_found) return rep;

    const SpectralField psi0 = stream_function(datum);
    rep.gap_t0 = saddle_value_gap(psi0, rep.a0, rep.b0);
    const SpectralField lap0 = laplacian(psi0);
    rep.analytic_rate =
        cfg.eta * (evaluate_at(lap0, {rep.a0[0], rep.a0[1], 0.0})[0] -
                   evaluate_at(lap0, {rep.b0[0], rep.b0[1], 0.0})[0]);
    rep.formula_rate =
        -2.0 * cfg.eps * cfg.eta * cfg.M * (1.0 + std::cos(cfg.eps * kPi));

    for (const auto& sr : trace_separatrices(datum, saddles0))
        if (sr.connection == Connection::kHeteroclinic) rep.connected_t0 = true;

    SpectralField u0 = random_velocity(grid, cfg.R, 3, cfg.seed);
    MhdParams params;
    params.nu = cfg.nu;
    params.eta = cfg.eta;
    params.dt = cfg.dt > 0.0 ? cfg.dt : rep.t1 / 8.0;
    params.t_end = rep.t1;
    const RunRecord run = evolve(make_state(std::move(u0), datum), params,
                                 {0.0, rep.t1 / 2.0, rep.t1});

    // Richardson-extrapolated forward difference of the saddle-value gap.
    std::array<double, 3> gap{};
    std::array<std::array<double, 2>, 3> pa{}, pb{};
    for (int j = 0; j < 3; ++j) {
        const SpectralField bt = dominant_part(run.snapshots[j].b);
        if (!locate(bt, pa[j], pb[j], nullptr)) return rep;
        gap[j] = saddle_value_gap(stream_function(bt), pa[j], pb[j]);
    }
    const double h = rep.t1 / 2.0;
    rep.measured_rate =
        (4.0 * (gap[1] - gap[0]) - (gap[2] - gap[0])) / (2.0 * h);
    rep.rate_ok = std::abs(rep.measured_rate - rep.analytic_rate) <=
                  std::max(0.02 * std::abs(rep.analytic_rate),
                           1e-6 * cfg.eta * cfg.M);

    const SpectralField bt1 = dominant_part(run.snapshots[2].b);
    std::vector<CriticalPoint> saddles1;
    std::array<double, 2> a1{}, b1{};
    if (!locate(bt1, a1, b1, &saddles1)) return rep;
    rep.min_approach_t1 = std::numeric_limits<double>::infinity();
    bool connected_t1 = false;
    for (const auto& sr : trace_separatrices(bt1, saddles1)) {
        if (sr.connection == Connection::kHeteroclinic) connected_t1 = true;
        rep.min_approach_t1 = std::min(rep.min_approach_t1, sr.min_approach);
    }
    rep.broken_t1 = !connected_t1;
    return rep;
}

Instant3dReport build_instant3d(const ScenarioConfig& cfg) {
    if (!(cfg.eps > 0.0 && cfg.eps < 1.0))
        throw std::invalid_argument("instant3d: eps in (0,1)");
    if (cfg.p < 1 || cfg.q < 1 || std::gcd(cfg.p, cfg.q) != 1)
        throw std::invalid_argument("instant3d: p, q coprime positive");
    if (cfg.M <= 0.0) throw std::invalid_argument("instant3d: M > 0");
    if (cfg.eta <= 0.0) throw std::invalid_argument("instant3d: eta > 0");
    const int res = cfg.resolution > 0 ? cfg.resolution : 32;
    const Grid grid(res, res, res);

    // curl W = W base: M (sin x3, cos x3, 0).
    BeltramiSpec base_spec;
    base_spec.frequency = 1;
    base_spec.amplitude = cfg.M;
    base_spec.modes.push_back({{0, 0, 1}, {0.0, 1.0, 0.0}});
    const SpectralField base = beltrami_field(base_spec, grid);

    const ShearSpec shear{cfg.eps, cfg.p, cfg.q};
    Instant3dReport rep;
    rep.datum = shear_pullback(base, shear);

    // Closed form of the pulled-back datum, sampled on the oversampled grid
    // and truncated like the pullback itself.
    const Grid fine(2 * res, 2 * res, 2 * res);
    std::vector<std::vector<double>> samples(3,
                                             std::vector<double>(fine.total()));
    std::size_t idx = 0;
    for (int i1 = 0; i1 < fine.modes[0]; ++i1) {
        const double x1 = fine.coord(0, i1);
        for (int i2 = 0; i2 < fine.modes[1]; ++i2) {
            const double x2 = fine.coord(1, i2);
            const double phase = cfg.p * x1 - cfg.q * x2;
            const double h = std::cos(phase);
            const double h1 = -cfg.p * std::sin(phase);
            const double h2 = cfg.q * std::sin(phase);
            for (int i3 = 0; i3 < fine.modes[2]; ++i3, ++idx) {
                const double z = fine.coord(2, i3) + cfg.eps * h;
                const double s = cfg.M * std::sin(z), co = cfg.M * std::cos(z);
                samples[0][idx] = s;
                samples[1][idx] = co;
                samples[2][idx] = -cfg.eps * (h1 * s + h2 * co);
            }
        }
    }
    const SpectralField formula =
        restrict_modes(to_spectral(samples, fine), grid);
    SpectralField diff = formula;
    axpy(diff, -1.0, rep.datum);
    rep.formula_mismatch = max_abs_coef(diff) / max_abs_coef(rep.datum);
    rep.divergence = divergence_defect(rep.datum);

    const SpectralField linear = scaled(laplacian(rep.datum), cfg.eta);
    rep.first_order = linear;
    if (cfg.R > 0.0) {
        const SpectralField u0 = random_velocity(grid, cfg.R, 3, cfg.seed);
        axpy(rep.first_order, -1.0, advect(u0, rep.datum));
        axpy(rep.first_order, 1.0, advect(rep.datum, u0));
    }
    SpectralField lin_diff = rep.first_order;
    axpy(lin_diff, -1.0, linear);
    rep.linear_part_mismatch =
        max_abs_coef(lin_diff) / std::max(max_abs_coef(linear), 1e-300);

    // Resonant torus of the unsheared field: cot x3 = p/q.
    const double x3s = std::atan2(static_cast<double>(cfg.q),
                                  static_cast<double>(cfg.p));
    const double period =
        kTwoPi * std::hypot(static_cast<double>(cfg.p),
                            static_cast<double>(cfg.q));
    rep.resonant_line =
        integrate_field_line(base, {0.0, 0.0, x3s}, 2.5 * period, 2e-3);
    rep.off_resonant_line =
        integrate_field_line(base, {0.0, 0.0, x3s + 0.5}, 2.5 * period, 2e-3);
    return rep;
}

EstimateReport verify_stability_decay(const RunRecord& reference,
                                      const RunRecord& perturbed, double nu,
                                      double eta) {
    EstimateReport rep;
    rep.raw = difference_norms(reference, perturbed, 3);
    const auto& t = rep.raw.times;
    if (t.size() < 3)
        throw std::invalid_argument("verify_stability_decay: run too short");

    double ref_scale = 0.0;
    for (const auto& row : reference.norms.b_norms)
        ref_scale = std::max(ref_scale, row.front());
    for (const auto& row : reference.norms.u_norms)
        ref_scale = std::max(ref_scale, row.front());

    std::vector<std::vector<double>> y(4, std::vector<double>(t.size()));
    double y_max = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i)
        for (int s = 0; s <= 3; ++s) {
            y[s][i] =
                std::hypot(rep.raw.u_norms[i][s], rep.raw.b_norms[i][s]);
            y_max = std::max(y_max, y[s][i]);
        }
    if (y_max <= 1e-12 * std::max(ref_scale, 1e-300)) {
        rep.pass = true;
        rep.note = "zero perturbation";
        rep.fitted_rates.assign(4, 0.0);
        return rep;
    }

    const double T = t.back();
    const double t0 = 0.1 * T;
    const double target = 0.9 * std::min(nu, eta);
    rep.pass = true;
    for (int s = 0; s <= 3; ++s) {
        const double rate = fit_decay_rate(t, y[s], t0, T);
        rep.fitted_rates.push_back(rate);
        double y_start = 0.0, y_end = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i) {
            if (y_start == 0.0 && t[i] >= t0) y_start = y[s][i];
            y_end = y[s][i];
        }
        if (!(y_start > 0.0 && y_end > 0.0) ||
            std::log(y_start / y_end) < 2.0) {
            rep.pass = false;
            rep.note = "decay window shorter than two e-foldings";
        }
        if (!(rate >= target)) rep.pass = false;
    }
    return rep;
}

EstimateReport verify_velocity_decay(const ScenarioConfig& cfg) {
    if (cfg.nu <= 3.0 * cfg.eta)
        throw std::invalid_argument("verify_velocity_decay: nu > 3 eta");
    if (cfg.T <= 0.0)
        throw std::invalid_argument("verify_velocity_decay: T > 0");
    const int res = cfg.resolution > 0 ? cfg.resolution : 64;
    const Grid grid(res, res);

    SpectralField u0 = SpectralField::vector_field(grid);
    if (cfg.R > 0.0) {
        u0 = random_velocity(grid, cfg.R, 4, cfg.seed);
    } else {
        // Shear flow a sin x2 in the first component: an exact single-rate
        // Navier-Stokes solution when b = 0.
        u0.mode(0, 0, 1, 0) = cd{0.0, -0.5};
        u0.mode(0, 0, -1, 0) = cd{0.0, 0.5};
        u0.set_divergence_free(true);
        u0.set_zero_mean(true);
    }

    MhdParams params;
    params.nu = cfg.nu;
    params.eta = cfg.eta;
    params.dt = cfg.dt > 0.0 ? cfg.dt : std::min(1e-3, 0.03 / cfg.nu);
    params.t_end = cfg.T;

    EstimateReport rep;
    if (cfg.M <= 0.0) {
        const RunRecord run = evolve(
            make_state(std::move(u0), SpectralField::vector_field(grid)),
            params, {});
        rep.raw = run.norms;
        std::vector<double> y(run.norms.times.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = run.norms.u_norms[i][0];
        rep.early_rate = fit_decay_rate(run.norms.times, y, 0.0,
                                        std::min(cfg.T, 1.0 / cfg.nu));
        rep.fitted_rates.assign(1, rep.early_rate);
        rep.pass = std::abs(rep.early_rate - cfg.nu) <= 0.01 * cfg.nu;
        if (!rep.pass) rep.note = "pure viscous rate off nu";
        return rep;
    }

    // Two perpendicular single-axis eigenfields (eigenvalues 1 and 4): their
    // Lorentz force survives the Leray projection and lives at |k|^2 = 5, so
    // the forced late-time velocity scales cleanly like 1/nu.
    SpectralField b0 = taylor_field({1, 0, 3, cfg.M}, grid);
    axpy(b0, 1.0, taylor_field({2, 0, 1, cfg.M}, grid));
    b0.set_divergence_free(true);
    b0.set_zero_mean(true);
    const RunRecord run1 = evolve(make_state(u0, b0), params, {});
    MhdParams params2 = params;
    params2.nu = 2.0 * cfg.nu;
    const RunRecord run2 = evolve(make_state(std::move(u0), b0), params2, {});

    rep.raw = run1.norms;
    const auto u_series = [](const RunRecord& run) {
        std::vector<double> y(run.norms.times.size());
        for (std::size_t i = 0; i < y.size(); ++i)
            y[i] = run.norms.u_norms[i][0];
        return y;
    };
    // Fit over the first e-folding of each run.
    const auto early_fit = [&](const RunRecord& run, double nu) {
        const auto y = u_series(run);
        return fit_decay_rate(run.norms.times, y, 0.0,
                              std::min(cfg.T, 1.0 / nu));
    };
    rep.early_rate = early_fit(run1, cfg.nu);
    const double early2 = early_fit(run2, 2.0 * cfg.nu);
    rep.fitted_rates = {rep.early_rate, early2};
    rep.late_ratio = run1.norms.u_norms.back()[0] /
                     std::max(run2.norms.u_norms.back()[0], 1e-300);
    const bool early_ok =
        rep.early_rate >= 0.8 * cfg.nu && rep.early_rate <= 1.2 * cfg.nu &&
        early2 >= 1.6 * cfg.nu && early2 <= 2.4 * cfg.nu;
    const bool late_ok = rep.late_ratio >= 1.6 && rep.late_ratio <= 2.4;
    rep.pass = early_ok && late_ok;
    if (!early_ok) rep.note = "early rate outside [0.8 nu, 1.2 nu]";
    if (!late_ok) rep.note += std::string(rep.note.empty() ? "" : "; ") +
                              "late amplitude ratio outside [1.6, 2.4]";
    return rep;
}

EstimateReport verify_energy_and_hr(const RunRecord& run,
                                    [[maybe_unused]] double nu,
                                    [[maybe_unused]] double eta,
                                    double expected_rate) {
    if (run.norms.order < 3)
        throw std::invalid_argument("verify_energy_and_hr: need H^3 norms");
    EstimateReport rep;
    rep.raw = run.norms;
    const ResidualSeries res = energy_identity_residual(run.ledger);
    rep.max_energy_residual = res.max_residual;
    const double e0 = run.ledger.energy.front();
    const bool energy_ok = res.max_residual <= 1e-4 * std::max(e0, 1e-300);

    const auto& t = run.norms.times;
    const double T = t.back();
    const double t0 = 0.1 * T;
    std::vector<std::vector<double>> y(4, std::vector<double>(t.size()));
    for (std::size_t i = 0; i < t.size(); ++i)
        for (int s = 0; s <= 3; ++s)
            y[s][i] =
                std::hypot(run.norms.u_norms[i][s], run.norms.b_norms[i][s]);

    bool hr_ok = true;
    if (expected_rate > 0.0) {
        for (int s = 0; s <= 3; ++s)
            rep.fitted_rates.push_back(fit_decay_rate(t, y[s], t0, T));
        hr_ok = std::abs(rep.fitted_rates[3] - expected_rate) <=
                0.01 * expected_rate;
        if (!hr_ok) rep.note = "H^3 decay rate off the dissipative eigenvalue";
    } else {
        double peak = 0.0;
        for (std::size_t i = 0; i < t.size(); ++i)
            if (t[i] >= t0) peak = std::max(peak, y[3][i]);
        rep.hr_growth = peak / std::max(y[3].front(), 1e-300);
        hr_ok = rep.hr_growth <= 1.01;
        if (!hr_ok) rep.note = "H^3 norm grew past the admissible envelope";
    }
    if (!energy_ok)
        rep.note += std::string(rep.note.empty() ? "" : "; ") +
                    "energy identity residual too large";
    rep.pass = energy_ok && hr_ok;
    return rep;
}

}  // namespace mhd
