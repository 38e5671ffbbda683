#include "mhdlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace mhd {

namespace {

void check_finite(const SpectralField& f, const char* what) {
    for (int c = 0; c < f.ncomp(); ++c)
        for (const cd& z : f.comp(c))
            if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
                std::ostringstream msg;
                msg << "solver: non-finite coefficient in " << what;
                throw std::runtime_error(msg.str());
            }
}

void require_state(const MhdState& state) {
    if (state.u.grid() != state.b.grid())
        throw std::invalid_argument("solver: u and b grids differ");
    if (state.u.ncomp() != state.u.grid().dim ||
        state.b.ncomp() != state.b.grid().dim)
        throw std::invalid_argument("solver: u and b must be vector fields");
}

// Pointwise max of max(|u|, |b|) over the collocation grid.
double max_speed(const MhdState& state) {
    double m = 0.0;
    for (const SpectralField* f : {&state.u, &state.b}) {
        const auto s = to_physical(*f);
        for (std::size_t i = 0; i < s[0].size(); ++i) {
            double q = 0.0;
            for (const auto& comp : s) q += comp[i] * comp[i];
            m = std::max(m, q);
        }
    }
    return std::sqrt(m);
}

double cfl_bound(const MhdState& state) {
    const Grid& g = state.u.grid();
    double dx = g.spacing(0);
    for (int a = 1; a < g.dim; ++a) dx = std::min(dx, g.spacing(a));
    const double speed = max_speed(state);
    return speed == 0.0 ? std::numeric_limits<double>::infinity()
                        : 0.5 * dx / speed;
}

// Nonlinear right-hand sides: Nu = P[-(u.grad)u + (b.grad)b],
// Nb = -(u.grad)b + (b.grad)u. Products formed in physical space on
// 2/3-truncated inputs; means zeroed (gauge).
struct Nonlinearity {
    SpectralField nu_term;  // momentum
    SpectralField nb_term;  // induction
};

// (a.grad)c accumulated into out with sign.
void add_advection(std::vector<std::vector<double>>& out,
                   const std::vector<std::vector<double>>& a,
                   const SpectralField& c_spec, double sign) {
    const Grid& g = c_spec.grid();
    for (int i = 0; i < g.dim; ++i)
        for (int j = 0; j < g.dim; ++j) {
            SpectralField dci = SpectralField::scalar_field(g);
            dci.comp(0) = c_spec.comp(i);
            const auto d = to_physical(differentiate(dci, j, 1));
            for (std::size_t p = 0; p < out[i].size(); ++p)
                out[i][p] += sign * a[j][p] * d[0][p];
        }
}

Nonlinearity nonlinearity(const SpectralField& u, const SpectralField& b,
                          bool do_dealias, bool freeze_velocity = false) {
    const Grid& g = u.grid();
    SpectralField ut = u, bt = b;
    if (do_dealias) {
        dealias(ut);
        dealias(bt);
    }
    const auto us = to_physical(ut);
    const auto bs = to_physical(bt);

    std::vector<std::vector<double>> nu_phys(
        g.dim, std::vector<double>(g.total(), 0.0));
    std::vector<std::vector<double>> nb_phys = nu_phys;
    add_advection(nu_phys, us, ut, -1.0);
    add_advection(nu_phys, bs, bt, 1.0);
    add_advection(nb_phys, us, bt, -1.0);
    add_advection(nb_phys, bs, ut, 1.0);

    Nonlinearity n{to_spectral(nu_phys, g), to_spectral(nb_phys, g)};
    if (do_dealias) {
        dealias(n.nu_term);
        dealias(n.nb_term);
    }
    if (freeze_velocity)
        n.nu_term = SpectralField(g, g.dim);
    else
        n.nu_term = leray_project(n.nu_term);
    n.nb_term = leray_project(n.nb_term);
    for (int c = 0; c < g.dim; ++c) {
        n.nu_term.comp(c)[0] = cd{0.0, 0.0};
        n.nb_term.comp(c)[0] = cd{0.0, 0.0};
    }
    return n;
}

struct Pair {
    SpectralField u;
    SpectralField b;
};

Pair heat(const Pair& p, double nu, double eta, double t) {
    return {heat_evolve(p.u, nu, t), heat_evolve(p.b, eta, t)};
}

Pair combined(const Pair& base, double a, const Nonlinearity& n) {
    Pair out = base;
    axpy(out.u, a, n.nu_term);
    axpy(out.b, a, n.nb_term);
    return out;
}

void step_ifrk4(MhdState& state, const MhdParams& p, double dt) {
    const Pair y0{state.u, state.b};
    const auto N = [&](const Pair& y) {
        return nonlinearity(y.u, y.b, p.dealias, p.freeze_velocity);
    };

    const Nonlinearity k1 = N(y0);
    const Pair half = heat(combined(y0, 0.5 * dt, k1), p.nu, p.eta, 0.5 * dt);
    const Nonlinearity k2 = N(half);
    const Pair y0_half = heat(y0, p.nu, p.eta, 0.5 * dt);
    const Nonlinearity k3 = N(combined(y0_half, 0.5 * dt, k2));
    const Pair y0_full = heat(y0, p.nu, p.eta, dt);
    Nonlinearity k3e = k3;
    k3e.nu_term = heat_evolve(k3.nu_term, p.nu, 0.5 * dt);
    k3e.nb_term = heat_evolve(k3.nb_term, p.eta, 0.5 * dt);
    const Nonlinearity k4 = N(combined(y0_full, dt, k3e));

    // u_{n+1} = E y0 + dt/6 (E k1 + 2 E_half (k2 + k3) + k4)
    Pair out = y0_full;
    axpy(out.u, dt / 6.0, heat_evolve(k1.nu_term, p.nu, dt));
    axpy(out.b, dt / 6.0, heat_evolve(k1.nb_term, p.eta, dt));
    axpy(out.u, dt / 3.0, heat_evolve(added(k2.nu_term, k3.nu_term), p.nu, 0.5 * dt));
    axpy(out.b, dt / 3.0, heat_evolve(added(k2.nb_term, k3.nb_term), p.eta, 0.5 * dt));
    axpy(out.u, dt / 6.0, k4.nu_term);
    axpy(out.b, dt / 6.0, k4.nb_term);

    state.u = std::move(out.u);
    state.b = std::move(out.b);
}

double phi_series(double z, int n) {
    // phi_n(z) = sum_{j>=0} z^j / (n + j)!
    double fact = 1.0;
    for (int j = 1; j <= n; ++j) fact *= j;
    double term = 1.0 / fact, sum = term;
    for (int j = 1; j <= 24; ++j) {
        term *= z / (n + j);
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

double phi1(double z) {
    return std::abs(z) < 0.5 ? phi_series(z, 1) : std::expm1(z) / z;
}
double phi2(double z) {
    return std::abs(z) < 0.5 ? phi_series(z, 2) : (std::expm1(z) - z) / (z * z);
}
double phi3(double z) {
    return std::abs(z) < 0.5
               ? phi_series(z, 3)
               : (std::expm1(z) - z - 0.5 * z * z) / (z * z * z);
}

// Multiply each coefficient by w(-kappa |k|^2 dt).
template <typename W>
SpectralField apply_symbol(const SpectralField& f, double kappa, double dt,
                           W&& w) {
    SpectralField out = f;
    const Grid& g = f.grid();
    for (int c = 0; c < f.ncomp(); ++c) {
        auto& a = out.comp(c);
        std::size_t idx = 0;
        for (int i1 = 0; i1 < g.modes[0]; ++i1)
            for (int i2 = 0; i2 < g.modes[1]; ++i2)
                for (int i3 = 0; i3 < g.modes[2]; ++i3, ++idx) {
                    const double k1 = g.freq(0, i1), k2 = g.freq(1, i2),
                                 k3 = g.dim == 3 ? g.freq(2, i3) : 0.0;
                    a[idx] *= w(-kappa * (k1 * k1 + k2 * k2 + k3 * k3) * dt);
                }
    }
    return out;
}

void step_etdrk4(MhdState& state, const MhdParams& p, double dt) {
    const Pair y0{state.u, state.b};
    const auto N = [&](const Pair& y) {
        return nonlinearity(y.u, y.b, p.dealias, p.freeze_velocity);
    };
    const auto sym = [&](const SpectralField& f, double kappa, double scale,
                         double (*w)(double)) {
        return apply_symbol(f, kappa, scale * dt,
                            [&](double z) { return w(z); });
    };
    const auto exph = [&](const Pair& y, double s) {
        return heat(y, p.nu, p.eta, s * dt);
    };

    const Nonlinearity n1 = N(y0);
    // a = E2 y0 + (dt/2) phi1(L dt/2) N(y0)
    Pair a = exph(y0, 0.5);
    axpy(a.u, 0.5 * dt, sym(n1.nu_term, p.nu, 0.5, phi1));
    axpy(a.b, 0.5 * dt, sym(n1.nb_term, p.eta, 0.5, phi1));
    const Nonlinearity na = N(a);

    Pair b = exph(y0, 0.5);
    axpy(b.u, 0.5 * dt, sym(na.nu_term, p.nu, 0.5, phi1));
    axpy(b.b, 0.5 * dt, sym(na.nb_term, p.eta, 0.5, phi1));
    const Nonlinearity nb = N(b);

    Pair c = exph(a, 0.5);
    SpectralField cu = nb.nu_term, cb = nb.nb_term;
    axpy(cu, -0.5, n1.nu_term);
    axpy(cb, -0.5, n1.nb_term);
    axpy(c.u, dt, sym(cu, p.nu, 0.5, phi1));
    axpy(c.b, dt, sym(cb, p.eta, 0.5, phi1));
    // note: c = E2 a + (dt/2) phi1 (2 N(b) - N(y0)), absorbed the factor 2
    const Nonlinearity nc = N(c);

    Pair out = exph(y0, 1.0);
    const auto w1 = [](double z) { return phi1(z) - 3 * phi2(z) + 4 * phi3(z); };
    const auto w2 = [](double z) { return 2 * phi2(z) - 4 * phi3(z); };
    const auto w3 = [](double z) { return 4 * phi3(z) - phi2(z); };
    axpy(out.u, dt, apply_symbol(n1.nu_term, p.nu, dt, w1));
    axpy(out.b, dt, apply_symbol(n1.nb_term, p.eta, dt, w1));
    axpy(out.u, dt, apply_symbol(added(na.nu_term, nb.nu_term), p.nu, dt, w2));
    axpy(out.b, dt, apply_symbol(added(na.nb_term, nb.nb_term), p.eta, dt, w2));
    axpy(out.u, dt, apply_symbol(nc.nu_term, p.nu, dt, w3));
    axpy(out.b, dt, apply_symbol(nc.nb_term, p.eta, dt, w3));

    state.u = std::move(out.u);
    state.b = std::move(out.b);
}

std::vector<double> norm_row(const SpectralField& f, int order) {
    std::vector<double> row(order + 1);
    for (int r = 0; r <= order; ++r) row[r] = sobolev_norm(f, r);
    return row;
}

}  // namespace

void MhdParams::validate() const {
    if (nu < 0.0) throw std::invalid_argument("MhdParams: nu >= 0");
    if (eta <= 0.0) throw std::invalid_argument("MhdParams: eta > 0");
    if (dt <= 0.0) throw std::invalid_argument("MhdParams: dt > 0");
}

MhdState make_state(SpectralField u, SpectralField b, double t) {
    MhdState state{t, std::move(u), std::move(b)};
    require_state(state);
    for (const SpectralField* f : {&state.u, &state.b}) {
        if (divergence_defect(*f) > 1e-10)
            throw std::invalid_argument("make_state: field not divergence-free");
        if (mean_magnitude(*f) > 1e-13 * std::max(max_abs_coef(*f), 1e-300))
            throw std::invalid_argument("make_state: field mean must vanish");
    }
    state.u.set_divergence_free(true);
    state.u.set_zero_mean(true);
    state.b.set_divergence_free(true);
    state.b.set_zero_mean(true);
    return state;
}

double total_energy(const MhdState& state) {
    const double nu2 = sobolev_norm(state.u, 0);
    const double nb2 = sobolev_norm(state.b, 0);
    return 0.5 * (nu2 * nu2 + nb2 * nb2);
}

void step(MhdState& state, const MhdParams& params, double dt) {
    params.validate();
    require_state(state);
    if (dt <= 0.0) throw std::invalid_argument("step: dt > 0");
    const double bound = cfl_bound(state);
    if (dt > bound * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg << "step: CFL violation, dt " << dt << " exceeds bound " << bound
            << " (use dt <= " << bound << ")";
        throw std::runtime_error(msg.str());
    }
    if (params.integrator == Integrator::kIFRK4)
        step_ifrk4(state, params, dt);
    else
        step_etdrk4(state, params, dt);
    state.t += dt;
    check_finite(state.u, "u");
    check_finite(state.b, "b");
    enforce_reality(state.u);
    enforce_reality(state.b);
    state.u.set_divergence_free(true);
    state.u.set_zero_mean(true);
    state.b.set_divergence_free(true);
    state.b.set_zero_mean(true);
}

RunRecord evolve(MhdState state, const MhdParams& params,
                 const std::vector<double>& snapshot_times, int norm_order) {
    params.validate();
    require_state(state);
    if (norm_order < 0) throw std::invalid_argument("evolve: norm_order >= 0");
    std::vector<double> wanted = snapshot_times;
    std::sort(wanted.begin(), wanted.end());
    const double t0 = state.t;
    for (double t : wanted)
        if (t < t0 - 1e-12 || t > params.t_end + 1e-12)
            throw std::invalid_argument(
                "evolve: snapshot time outside [t, t_end]");

    RunRecord rec;
    rec.dt_base = params.dt;
    rec.norms.order = norm_order;
    rec.ledger.gamma0 = 2.0 * total_energy(state) + 1.0;

    std::size_t next_snap = 0;
    const auto take_snapshots = [&]() {
        while (next_snap < wanted.size() &&
               wanted[next_snap] <= state.t + 1e-12) {
            rec.snapshots.push_back(state);
            rec.snapshots.back().t = wanted[next_snap];
            ++next_snap;
        }
    };
    const auto log_row = [&]() {
        rec.ledger.times.push_back(state.t);
        rec.ledger.energy.push_back(total_energy(state));
        double gu = 0.0, gb = 0.0;
        {
            const double h1u = sobolev_norm(state.u, 1);
            const double l2u = sobolev_norm(state.u, 0);
            gu = h1u * h1u - l2u * l2u;  // ||grad u||^2
            const double h1b = sobolev_norm(state.b, 1);
            const double l2b = sobolev_norm(state.b, 0);
            gb = h1b * h1b - l2b * l2b;
        }
        rec.ledger.u_dissipation.push_back(params.nu * gu);
        rec.ledger.b_dissipation.push_back(params.eta * gb);
        if (rec.ledger.cumulative_dissipation.empty()) {
            rec.ledger.cumulative_dissipation.push_back(0.0);
        } else {
            const std::size_t j = rec.ledger.times.size() - 1;
            const double dtj = rec.ledger.times[j] - rec.ledger.times[j - 1];
            const double mid = 0.5 * (rec.ledger.u_dissipation[j] +
                                      rec.ledger.b_dissipation[j] +
                                      rec.ledger.u_dissipation[j - 1] +
                                      rec.ledger.b_dissipation[j - 1]);
            rec.ledger.cumulative_dissipation.push_back(
                rec.ledger.cumulative_dissipation[j - 1] + dtj * mid);
        }
        rec.norms.times.push_back(state.t);
        rec.norms.u_norms.push_back(norm_row(state.u, norm_order));
        rec.norms.b_norms.push_back(norm_row(state.b, norm_order));
    };

    take_snapshots();
    log_row();
    while (state.t < params.t_end - 1e-12) {
        double dt = std::min(params.dt, cfl_bound(state));
        const double next_stop = next_snap < wanted.size()
                                     ? std::min(wanted[next_snap], params.t_end)
                                     : params.t_end;
        dt = std::min(dt, next_stop - state.t);
        step(state, params, dt);
        ++rec.steps;
        log_row();
        take_snapshots();
        // Normalize by the state scale: a field that is pure roundoff
        // noise next to its partner carries no meaningful divergence.
        const double scale =
            std::max({max_abs_coef(state.u), max_abs_coef(state.b), 1e-300});
        if (max_abs_coef(divergence(state.u)) > 1e-10 * scale ||
            max_abs_coef(divergence(state.b)) > 1e-10 * scale)
            throw std::runtime_error("evolve: divergence invariant violated");
    }
    take_snapshots();
    return rec;
}

ResidualSeries energy_identity_residual(const EnergyLedger& ledger) {
    if (ledger.times.size() < 3)
        throw std::invalid_argument(
            "energy_identity_residual: need at least 3 records");
    ResidualSeries out;
    for (std::size_t j = 1; j + 1 < ledger.times.size(); ++j) {
        const double dt = ledger.times[j + 1] - ledger.times[j - 1];
        const double dEdt = (ledger.energy[j + 1] - ledger.energy[j - 1]) / dt;
        const double res = std::abs(dEdt + ledger.u_dissipation[j] +
                                    ledger.b_dissipation[j]);
        out.times.push_back(ledger.times[j]);
        out.residuals.push_back(res);
        out.max_residual = std::max(out.max_residual, res);
    }
    return out;
}

SpectralField recover_pressure(const MhdState& state) {
    require_state(state);
    const Grid& g = state.u.grid();
    SpectralField ut = state.u, bt = state.b;
    dealias(ut);
    dealias(bt);
    const auto us = to_physical(ut);
    const auto bs = to_physical(bt);
    std::vector<std::vector<double>> rhs(g.dim,
                                         std::vector<double>(g.total(), 0.0));
    add_advection(rhs, bs, bt, 1.0);
    add_advection(rhs, us, ut, -1.0);
    SpectralField force = to_spectral(rhs, g);
    dealias(force);
    SpectralField div = divergence(force);
    div.comp(0)[0] = cd{0.0, 0.0};  // zero-mean gauge
    SpectralField p = invert_laplacian(div);
    p.set_zero_mean(true);
    return p;
}

DuhamelSeries duhamel_decompose(const RunRecord& run, const SpectralField& h0,
                                const SpectralField& reference_b0, double eta,
                                int r) {
    if (run.snapshots.empty())
        throw std::invalid_argument("duhamel_decompose: run has no snapshots");
    const Grid& g = run.snapshots.front().b.grid();
    if (h0.grid() != g || reference_b0.grid() != g)
        throw std::invalid_argument("duhamel_decompose: grid mismatch");
    const double t0 = run.snapshots.front().t;
    DuhamelSeries out;
    for (const MhdState& s : run.snapshots) {
        const double tau = s.t - t0;
        const SpectralField lin = heat_evolve(h0, eta, tau);
        SpectralField d = s.b;
        axpy(d, -1.0, heat_evolve(reference_b0, eta, tau));
        axpy(d, -1.0, lin);
        out.times.push_back(s.t);
        out.linear_norm.push_back(sobolev_norm(lin, r));
        out.remainder_norm.push_back(sobolev_norm(d, r));
    }
    return out;
}

NormSeries difference_norms(const RunRecord& a, const RunRecord& b, int r) {
    if (a.snapshots.size() != b.snapshots.size())
        throw std::invalid_argument("difference_norms: schedule mismatch");
    NormSeries out;
    out.order = r;
    for (std::size_t j = 0; j < a.snapshots.size(); ++j) {
        const MhdState& sa = a.snapshots[j];
        const MhdState& sb = b.snapshots[j];
        if (std::abs(sa.t - sb.t) > 1e-12)
            throw std::invalid_argument("difference_norms: schedule mismatch");
        if (sa.u.grid() != sb.u.grid())
            throw std::invalid_argument("difference_norms: grid mismatch");
        SpectralField v = sa.u, h = sa.b;
        axpy(v, -1.0, sb.u);
        axpy(h, -1.0, sb.b);
        out.times.push_back(sa.t);
        out.u_norms.push_back(norm_row(v, r));
        out.b_norms.push_back(norm_row(h, r));
    }
    return out;
}

double induction_gauge_residual(const MhdState& state,
                                const MhdParams& params) {
    require_state(state);
    if (state.u.grid().dim != 2)
        throw std::invalid_argument("induction_gauge_residual: 2-D only");
    // Zero-pad onto a doubled grid so every quadratic product below is
    // represented exactly (the identity is algebraic, not a solver property).
    const Grid& gc = state.u.grid();
    const Grid g(2 * gc.modes[0], 2 * gc.modes[1]);
    const auto embed = [&](const SpectralField& f) {
        SpectralField out(g, f.ncomp());
        for (int c = 0; c < f.ncomp(); ++c)
            for (int i1 = 0; i1 < gc.modes[0]; ++i1)
                for (int i2 = 0; i2 < gc.modes[1]; ++i2) {
                    const int k1 = gc.freq(0, i1), k2 = gc.freq(1, i2);
                    out.mode(c, k1, k2) = f.at(c, i1, i2);
                }
        return out;
    };
    const SpectralField u = embed(state.u);
    const SpectralField b = embed(state.b);
    const SpectralField psi = scaled(invert_laplacian(curl(b)), -1.0);

    const auto us = to_physical(u);
    const auto bs = to_physical(b);
    std::vector<std::vector<double>> rhs(2,
                                         std::vector<double>(g.total(), 0.0));
    add_advection(rhs, us, b, -1.0);
    add_advection(rhs, bs, u, 1.0);
    SpectralField dtb = to_spectral(rhs, g);
    axpy(dtb, params.eta, laplacian(b));
    for (int c = 0; c < 2; ++c) dtb.comp(c)[0] = cd{0.0, 0.0};
    const SpectralField dtpsi = scaled(invert_laplacian(curl(dtb)), -1.0);

    // g = d_t psi + u.grad psi - eta Lap psi, should be spatially constant
    const auto dtpsi_s = to_physical(dtpsi);
    const auto lap_s = to_physical(laplacian(psi));
    const auto gx = to_physical(differentiate(psi, 0, 1));
    const auto gy = to_physical(differentiate(psi, 1, 1));
    double mean = 0.0;
    std::vector<double> gval(g.total());
    for (std::size_t i = 0; i < gval.size(); ++i) {
        gval[i] = dtpsi_s[0][i] + us[0][i] * gx[0][i] + us[1][i] * gy[0][i] -
                  params.eta * lap_s[0][i];
        mean += gval[i];
    }
    mean /= static_cast<double>(gval.size());
    double dev = 0.0;
    for (double v : gval) dev = std::max(dev, std::abs(v - mean));
    return dev;
}

}  // namespace mhd
