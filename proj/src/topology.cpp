#include "mhdlab/topology.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mhd {

namespace {

double wrap(double x) {
    x = std::fmod(x, kTwoPi);
    return x < 0.0 ? x + kTwoPi : x;
}

double axis_dist(double a, double b) {
    double d = std::abs(wrap(a) - wrap(b));
    return std::min(d, kTwoPi - d);
}

double torus_dist(const std::array<double, 2>& a,
                  const std::array<double, 2>& b) {
    const double d0 = axis_dist(a[0], b[0]);
    const double d1 = axis_dist(a[1], b[1]);
    return std::hypot(d0, d1);
}

double max_entry(const Mat2& m) {
    double v = 0.0;
    for (const auto& row : m)
        for (double e : row) v = std::max(v, std::abs(e));
    return v;
}

double det2(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }

// Solve m x = r; returns false when m is numerically singular.
bool solve2(const Mat2& m, const std::array<double, 2>& r,
            std::array<double, 2>& x) {
    const double d = det2(m);
    const double scale = max_entry(m);
    if (std::abs(d) <= 1e-14 * scale * scale) return false;
    x[0] = (r[0] * m[1][1] - r[1] * m[0][1]) / d;
    x[1] = (r[1] * m[0][0] - r[0] * m[1][0]) / d;
    return true;
}

struct Probe {
    std::array<double, 2> value{};
    Mat2 jacobian{};
    double residual = 0.0;
};

Probe probe_at(const Evaluator& ev, const std::array<double, 2>& x) {
    std::array<double, 3> val;
    std::array<std::array<double, 3>, 3> jac;
    ev.value_and_jacobian({x[0], x[1], 0.0}, val, jac);
    Probe p;
    p.value = {val[0], val[1]};
    p.jacobian = {{{jac[0][0], jac[0][1]}, {jac[1][0], jac[1][1]}}};
    p.residual = std::hypot(val[0], val[1]);
    return p;
}

// Full Newton iteration; returns true on convergence.
bool newton(const Evaluator& ev, std::array<double, 2>& x, double abs_tol) {
    for (int it = 0; it < 60; ++it) {
        const Probe p = probe_at(ev, x);
        std::array<double, 2> dx;
        if (!solve2(p.jacobian, p.value, dx)) return false;
        x[0] = wrap(x[0] - dx[0]);
        x[1] = wrap(x[1] - dx[1]);
        if (std::hypot(dx[0], dx[1]) < 1e-13 &&
            probe_at(ev, x).residual <= abs_tol)
            return true;
    }
    return probe_at(ev, x).residual <= abs_tol;
}

struct LineContext {
    const Evaluator& ev;
    double max_abs;
    double sign;  // +1 forward, -1 reversed field
};

// Unit-speed right-hand side; false at a stagnation point.
bool direction(const LineContext& ctx, const std::array<double, 3>& x,
               std::array<double, 3>& d) {
    const auto v = ctx.ev.value(x);
    const double speed = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (speed <= 1e-8 * ctx.max_abs) return false;
    for (int a = 0; a < 3; ++a) d[a] = ctx.sign * v[a] / speed;
    return true;
}

bool rk4_step(const LineContext& ctx, std::array<double, 3>& x, double h) {
    std::array<double, 3> k1, k2, k3, k4, y;
    if (!direction(ctx, x, k1)) return false;
    for (int a = 0; a < 3; ++a) y[a] = x[a] + 0.5 * h * k1[a];
    if (!direction(ctx, y, k2)) return false;
    for (int a = 0; a < 3; ++a) y[a] = x[a] + 0.5 * h * k2[a];
    if (!direction(ctx, y, k3)) return false;
    for (int a = 0; a < 3; ++a) y[a] = x[a] + h * k3[a];
    if (!direction(ctx, y, k4)) return false;
    for (int a = 0; a < 3; ++a)
        x[a] += h / 6.0 * (k1[a] + 2.0 * k2[a] + 2.0 * k3[a] + k4[a]);
    return true;
}

double cover_dist(const std::array<double, 3>& x,
                  const std::array<double, 3>& x0, int dim) {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
        const double d = axis_dist(x[a], x0[a]);
        s += d * d;
    }
    return std::sqrt(s);
}

}  // namespace

PointKind classify(const Mat2& jacobian) {
    const double scale = max_entry(jacobian);
    const double tol = 1e-8 * scale * scale;
    const double d = det2(jacobian);
    if (d < -tol) return PointKind::kSaddle;
    if (d > tol) return PointKind::kCenter;
    return PointKind::kDegenerate;
}

std::vector<CriticalPoint> find_critical_points(const SpectralField& f,
                                                double tol) {
    if (f.grid().dim != 2 || f.ncomp() != 2)
        throw std::invalid_argument(
            "find_critical_points: 2-D vector field required");
    if (max_abs_coef(f) == 0.0)
        throw std::invalid_argument("find_critical_points: zero field");
    const Evaluator ev(f);
    const double abs_tol = tol * ev.max_abs_value();
    const Grid& g = f.grid();
    const int n1 = g.modes[0], n2 = g.modes[1];

    // |f|^2 on the collocation grid
    const auto s = to_physical(f);
    std::vector<double> mag2(g.total());
    for (std::size_t i = 0; i < mag2.size(); ++i)
        mag2[i] = s[0][i] * s[0][i] + s[1][i] * s[1][i];
    const auto at = [&](int i1, int i2) {
        return mag2[static_cast<std::size_t>((i1 + n1) % n1) * n2 +
                    (i2 + n2) % n2];
    };

    std::vector<CriticalPoint> found;
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            const double v = at(i1, i2);
            bool is_min = true;
            for (int d1 = -1; d1 <= 1 && is_min; ++d1)
                for (int d2 = -1; d2 <= 1; ++d2) {
                    if (d1 == 0 && d2 == 0) continue;
                    if (at(i1 + d1, i2 + d2) < v) {
                        is_min = false;
                        break;
                    }
                }
            if (!is_min) continue;

            std::array<double, 2> x{g.coord(0, i1), g.coord(1, i2)};
            if (!newton(ev, x, abs_tol)) continue;

            bool duplicate = false;
            for (const CriticalPoint& cp : found)
                if (torus_dist(cp.position, x) < 1e-6) {
                    duplicate = true;
                    break;
                }
            if (duplicate) continue;

            const Probe p = probe_at(ev, x);
            CriticalPoint cp;
            cp.position = x;
            cp.jacobian = p.jacobian;
            cp.kind = classify(p.jacobian);
            cp.residual = p.residual;
            found.push_back(cp);
        }
    std::sort(found.begin(), found.end(),
              [](const CriticalPoint& a, const CriticalPoint& b) {
                  return a.position[0] != b.position[0]
                             ? a.position[0] < b.position[0]
                             : a.position[1] < b.position[1];
              });
    return found;
}

ContinuationReport continue_critical_points(const TaylorSpec& base,
                                            const SpectralField& perturbed,
                                            int L) {
    base.validate();
    if (base.m < 1)
        throw std::invalid_argument(
            "continue_critical_points: base needs n, m >= 1");
    if (L < 1) throw std::invalid_argument("continue_critical_points: L >= 1");
    const Evaluator ev(perturbed);
    const double abs_tol = 1e-10 * ev.max_abs_value();

    ContinuationReport rep;
    rep.radius = std::pow(static_cast<double>(base.n * base.n + base.m * base.m),
                          -0.5 * L);
    const int n = base.n, m = base.m;
    const double pi = kTwoPi / 2.0;
    for (int half = 0; half < 2; ++half) {
        // half 0: saddle lattice x*, half 1: center lattice xbar
        const double off1 = half == 0 ? 0.0 : pi / (2.0 * n);
        const double off2 = half == 0 ? 0.0 : pi / (2.0 * m);
        for (int k1 = 0; k1 < 2 * n; ++k1)
            for (int k2 = 0; k2 < 2 * m; ++k2) {
                ContinuedPoint cp;
                cp.lattice = {wrap(k1 * pi / n + off1),
                              wrap(k2 * pi / m + off2)};
                std::array<double, 2> x = cp.lattice;
                const Mat2 j0 = probe_at(ev, cp.lattice).jacobian;
                cp.lost = true;
                for (int it = 0; it < 100; ++it) {
                    ++cp.iterations;
                    const Probe p = probe_at(ev, x);
                    std::array<double, 2> dx;
                    if (!solve2(j0, p.value, dx)) break;
                    x[0] -= dx[0];
                    x[1] -= dx[1];
                    if (torus_dist(x, cp.lattice) > rep.radius) break;
                    if (std::hypot(dx[0], dx[1]) < 1e-13) {
                        if (probe_at(ev, x).residual <= abs_tol)
                            cp.lost = false;
                        break;
                    }
                }
                cp.position = {wrap(x[0]), wrap(x[1])};
                if (!cp.lost) cp.kind = classify(probe_at(ev, x).jacobian);
                rep.any_lost = rep.any_lost || cp.lost;
                rep.points.push_back(cp);
            }
    }
    rep.min_pairwise = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.points.size(); ++i)
        for (std::size_t j = i + 1; j < rep.points.size(); ++j) {
            if (rep.points[i].lost || rep.points[j].lost) continue;
            rep.min_pairwise =
                std::min(rep.min_pairwise, torus_dist(rep.points[i].position,
                                                      rep.points[j].position));
        }
    rep.any_merged = rep.min_pairwise < 1e-6;
    return rep;
}

SpectralField stream_function(const SpectralField& f) {
    if (f.grid().dim != 2 || f.ncomp() != 2)
        throw std::invalid_argument("stream_function: 2-D vector field");
    SpectralField psi = scaled(invert_laplacian(curl(f)), -1.0);
    psi.set_zero_mean(true);
    return psi;
}

FieldLine integrate_field_line(const SpectralField& f,
                               const std::array<double, 3>& x0,
                               double max_arclength, double step) {
    if (max_arclength <= 0.0 || step <= 0.0 || step >= max_arclength)
        throw std::invalid_argument("integrate_field_line: bad step bounds");
    const Evaluator ev(f);
    const LineContext ctx{ev, ev.max_abs_value(), 1.0};
    const int dim = f.grid().dim;
    {
        const auto v = ev.value(x0);
        if (std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) <=
            1e-8 * ctx.max_abs)
            throw std::invalid_argument(
                "integrate_field_line: start is a stagnation point");
    }

    FieldLine line;
    std::array<double, 3> x = x0;
    line.samples.push_back(x);
    double s = 0.0;
    bool stagnated = false;
    while (s < max_arclength) {
        const double h = std::min(step, max_arclength - s);
        if (!rk4_step(ctx, x, h)) {
            stagnated = true;
            break;
        }
        s += h;
        line.samples.push_back(x);
        if (s < 5.0 * step) continue;
        double d = cover_dist(x, x0, dim);
        if (d >= step) continue;
        // refine toward the closest approach
        std::array<double, 3> xr = x;
        double sr = s;
        for (int it = 0; it < 200 && d > 1e-7; ++it) {
            std::array<double, 3> xt = xr;
            const double hr = std::max(0.5 * d, 1e-9);
            if (!rk4_step(ctx, xt, hr)) break;
            const double dt = cover_dist(xt, x0, dim);
            if (dt >= d) break;
            xr = xt;
            sr += hr;
            d = dt;
        }
        if (d < 1e-6) {
            line.closure = Closure::kClosed;
            line.arclength = sr;
            line.samples.push_back(xr);
            for (int a = 0; a < dim; ++a)
                line.winding[a] =
                    static_cast<int>(std::lround((xr[a] - x0[a]) / kTwoPi));
            for (int a = 0; a < 3; ++a)
                line.rotation[a] = (xr[a] - x0[a]) / sr;
            return line;
        }
    }
    line.arclength = s;
    if (!stagnated && s > 0.0) {
        double drift = 0.0;
        for (int a = 0; a < 3; ++a) {
            line.rotation[a] = (x[a] - x0[a]) / s;
            drift += line.rotation[a] * line.rotation[a];
        }
        line.closure = std::sqrt(drift) > 0.1 ? Closure::kQuasiPeriodic
                                              : Closure::kUndetermined;
    }
    return line;
}

std::optional<std::array<int, 3>> winding_vector(const FieldLine& line) {
    if (line.closure == Closure::kUndetermined)
        throw std::invalid_argument("winding_vector: closure undetermined");
    if (line.closure == Closure::kClosed) return line.winding;
    return std::nullopt;
}

std::vector<SeparatrixReport> trace_separatrices(
    const SpectralField& f, const std::vector<CriticalPoint>& saddles) {
    if (f.grid().dim != 2 || f.ncomp() != 2)
        throw std::invalid_argument("trace_separatrices: 2-D vector field");
    const Evaluator ev(f);
    const double max_abs = ev.max_abs_value();
    constexpr double kOffset = 1e-4;
    constexpr double kConnectTol = 1e-3;
    const double cap = 8.0 * kTwoPi;
    const double step = 2e-3;

    std::vector<SeparatrixReport> reports;
    for (std::size_t si = 0; si < saddles.size(); ++si) {
        const CriticalPoint& sp = saddles[si];
        if (sp.kind != PointKind::kSaddle) continue;
        const Mat2& j = sp.jacobian;
        // eigenvalues of the 2x2 Jacobian (real for a saddle)
        const double tr = j[0][0] + j[1][1];
        const double disc = std::sqrt(tr * tr / 4.0 - det2(j));
        const double lam[2] = {tr / 2.0 + disc, tr / 2.0 - disc};
        for (int e = 0; e < 2; ++e) {
            // eigenvector for lam[e]
            std::array<double, 2> v{j[0][1], lam[e] - j[0][0]};
            if (std::hypot(v[0], v[1]) <
                1e-12 * std::max(1.0, max_entry(j))) {
                v = {lam[e] - j[1][1], j[1][0]};
            }
            const double nv = std::hypot(v[0], v[1]);
            v[0] /= nv;
            v[1] /= nv;
            const bool unstable = lam[e] > 0.0;
            for (int sgn = 0; sgn < 2; ++sgn) {
                const double s = sgn == 0 ? 1.0 : -1.0;
                SeparatrixReport rep;
                rep.source = static_cast<int>(si);
                rep.branch =
                    unstable
                        ? (sgn == 0 ? Branch::kUnstablePlus
                                    : Branch::kUnstableMinus)
                        : (sgn == 0 ? Branch::kStablePlus
                                    : Branch::kStableMinus);
                rep.min_approach = std::numeric_limits<double>::infinity();

                const LineContext ctx{ev, max_abs, unstable ? 1.0 : -1.0};
                std::array<double, 3> x{sp.position[0] + s * kOffset * v[0],
                                        sp.position[1] + s * kOffset * v[1],
                                        0.0};
                double arc = 0.0;
                while (arc < cap) {
                    if (!rk4_step(ctx, x, step)) break;
                    arc += step;
                    for (std::size_t ti = 0; ti < saddles.size(); ++ti) {
                        if (saddles[ti].kind != PointKind::kSaddle) continue;
                        if (ti == si && arc < 0.1) continue;
                        const double d = torus_dist(
                            {wrap(x[0]), wrap(x[1])}, saddles[ti].position);
                        if (ti != si || arc >= 0.1)
                            rep.min_approach = std::min(rep.min_approach, d);
                        if (d <= kConnectTol) {
                            rep.terminal = static_cast<int>(ti);
                            rep.connection = ti == si
                                                 ? Connection::kHomoclinic
                                                 : Connection::kHeteroclinic;
                        }
                    }
                    if (rep.connection != Connection::kNone) break;
                }
                reports.push_back(rep);
            }
        }
    }
    return reports;
}

double saddle_value_gap(const SpectralField& psi,
                        const std::array<double, 2>& a,
                        const std::array<double, 2>& b) {
    if (!psi.is_scalar())
        throw std::invalid_argument("saddle_value_gap: scalar field required");
    return evaluate_at(psi, {a[0], a[1], 0.0})[0] -
           evaluate_at(psi, {b[0], b[1], 0.0})[0];
}

TopologyReport topology_report(const SpectralField& f) {
    TopologyReport rep;
    rep.points = find_critical_points(f);
    for (const CriticalPoint& cp : rep.points) {
        if (cp.kind == PointKind::kSaddle) ++rep.n_saddles;
        else if (cp.kind == PointKind::kCenter) ++rep.n_centers;
        else ++rep.n_degenerate;
    }
    rep.separatrices = trace_separatrices(f, rep.points);
    for (const SeparatrixReport& sr : rep.separatrices) {
        if (sr.connection == Connection::kHeteroclinic) ++rep.n_heteroclinic;
        else if (sr.connection == Connection::kHomoclinic) ++rep.n_homoclinic;
    }
    return rep;
}

bool reports_equivalent(const TopologyReport& a, const TopologyReport& b) {
    return a.n_saddles == b.n_saddles && a.n_centers == b.n_centers;
}

}  // namespace mhd
