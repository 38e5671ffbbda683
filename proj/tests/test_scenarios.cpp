#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mhdlab/scenarios.hpp"

using namespace mhd;

namespace {

constexpr double kPi = std::numbers::pi;

std::vector<double> uniform_times(double T, int count) {
    std::vector<double> out;
    for (int i = 0; i <= count; ++i) out.push_back(T * i / count);
    return out;
}

}  // namespace

TEST_CASE("feasible parameter search") {
    SUBCASE("reference parameters select the first separated pair") {
        const auto fp = feasible_parameters(1.0, 1.0, 1.0, 1.0, 2, 0.1);
        CHECK(fp.feasible);
        CHECK(fp.n == 1);
        CHECK(fp.m == 4);
        // delta = c M / N^{L+1} with N^2 = 17
        CHECK(fp.delta == doctest::Approx(0.1 / std::pow(17.0, 1.5)).epsilon(1e-12));
        // e^{-eta (N^2-1) T} * M pi sqrt(1 + N^2 + N^4 + N^6) / delta
        const double s = 17.0;
        const double want = std::exp(-16.0) * kPi *
                            std::sqrt(1.0 + s + s * s + s * s * s) / fp.delta;
        CHECK(fp.contamination == doctest::Approx(want).epsilon(1e-12));
        CHECK(fp.contamination < 0.05);
        CHECK(fp.resolution == 32);
    }

    SUBCASE("vanishing horizon is infeasible") {
        const auto fp = feasible_parameters(1.0, 1e-9, 1.0, 1.0, 2, 0.1);
        CHECK_FALSE(fp.feasible);
        CHECK(fp.violated == "contamination");
        CHECK(fp.contamination > 0.05);
    }

    SUBCASE("doubling the resistivity shrinks the required eigenvalue") {
        const auto base = feasible_parameters(1.0, 1.0, 1.0, 1.0, 2, 0.1);
        const auto fast = feasible_parameters(1.0, 1.0, 2.0, 1.0, 2, 0.1);
        CHECK(fast.feasible);
        const int e_base = base.n * base.n + base.m * base.m;
        const int e_fast = fast.n * fast.n + fast.m * fast.m;
        CHECK(e_fast < e_base);
    }

    SUBCASE("parameter validation") {
        CHECK_THROWS(feasible_parameters(0.0, 1.0, 1.0, 1.0, 2, 0.1));
        CHECK_THROWS(feasible_parameters(1.0, 1.0, 0.0, 1.0, 2, 0.1));
        CHECK_THROWS(feasible_parameters(1.0, 1.0, 1.0, 1.0, 1, 0.1));
        CHECK_THROWS(feasible_parameters(1.0, 1.0, 1.0, 1.0, 2, 1.5));
    }
}

TEST_CASE("reconnection scenario end to end") {
    ScenarioConfig cfg;
    cfg.kind = "reconnect2d";
    const auto v = run_reconnect2d(cfg);

    CHECK(v.reconnected);
    CHECK_FALSE(v.inconclusive);
    CHECK(v.params.n == 1);
    CHECK(v.params.m == 4);
    CHECK(v.delta == doctest::Approx(0.1 / std::pow(17.0, 1.5)).epsilon(1e-12));

    // t = 0: the full 8nm critical lattice of V_{14}.
    CHECK(v.report_t0.n_saddles == 16);
    CHECK(v.report_t0.n_centers == 16);
    CHECK(v.report_t0.n_degenerate == 0);
    CHECK_FALSE(v.continuation.any_lost);
    CHECK(v.continuation.points.size() == 32);

    // t = T: the four critical points of V_1, all connections homoclinic.
    CHECK(v.report_T.n_saddles == 2);
    CHECK(v.report_T.n_centers == 2);
    CHECK(v.report_T.n_heteroclinic == 0);
    CHECK(v.report_T.n_homoclinic > 0);
    CHECK_FALSE(reports_equivalent(v.report_t0, v.report_T));

    // The rescaled end state tracks V_1 within the decayed-eigenfield residue.
    CHECK(v.closeness <= 0.1);
    CHECK(v.closeness == doctest::Approx(v.params.contamination).epsilon(0.15));

    // The inequivalence decision is symmetric in the two reports.
    CHECK(reports_equivalent(v.report_T, v.report_t0) ==
          reports_equivalent(v.report_t0, v.report_T));

    // Determinism: the verdict is a pure function of the configuration.
    const auto w = run_reconnect2d(cfg);
    CHECK(w.closeness == v.closeness);
    CHECK(w.reconnected == v.reconnected);
}

TEST_CASE("reconnection without the breaking perturbation") {
    ScenarioConfig cfg;
    cfg.c = 0.0;
    const auto v = run_reconnect2d(cfg);
    CHECK_FALSE(v.reconnected);
    CHECK(v.delta == 0.0);
    CHECK_FALSE(v.note.empty());
    CHECK(v.closeness > 0.1);

    SUBCASE("invalid configurations throw") {
        ScenarioConfig bad;
        bad.T = 0.0;
        CHECK_THROWS(run_reconnect2d(bad));
        bad = ScenarioConfig{};
        bad.eta = 0.0;
        CHECK_THROWS(run_reconnect2d(bad));
        bad = ScenarioConfig{};
        bad.c = 1.0;
        CHECK_THROWS(run_reconnect2d(bad));
    }
}

TEST_CASE("viscous escalation with arbitrary velocity") {
    ScenarioConfig cfg;
    cfg.nu = 3.2;
    cfg.eta = 1.0;
    cfg.R = 2.0;
    cfg.seed = 3;
    const auto v = run_viscous2d(cfg);
    CHECK(v.reconnected);
    CHECK(v.escalation.size() == 3);
    CHECK(v.escalation[0].first == doctest::Approx(3.2));
    CHECK(v.escalation[2].first == doctest::Approx(12.8));
    // Doubling the viscosity tightens the closeness monotonically.
    CHECK(v.escalation[0].second > v.escalation[1].second);
    CHECK(v.escalation[1].second > v.escalation[2].second);
    CHECK(v.escalation[0].second > 0.1);
    CHECK(v.escalation[2].second <= 0.1);
}

TEST_CASE("fixed small viscosity degrades closeness") {
    ScenarioConfig fixed;
    fixed.nu = 1.0;
    fixed.R = 2.0;
    fixed.seed = 3;
    const auto w = run_reconnect2d(fixed);
    CHECK_FALSE(w.reconnected);
    CHECK(w.closeness > 0.1);

    ScenarioConfig bad;
    bad.nu = 2.0;
    bad.eta = 1.0;
    CHECK_THROWS(run_viscous2d(bad));
}

TEST_CASE("instantaneous 2-D break rate") {
    ScenarioConfig cfg;
    cfg.eps = 0.1;
    cfg.eta = 0.01;
    cfg.nu = 0.01;
    cfg.resolution = 128;
    const auto r = run_instant2d(cfg);

    CHECK(r.saddles_found);
    // Saddles of psi = sin x1 cos(x2 - eps x1) on the linear strip.
    CHECK(std::abs(std::remainder(r.a0[0], kTwoPi)) < 1e-6);
    CHECK(r.a0[1] == doctest::Approx(kPi / 2.0).epsilon(1e-6));
    CHECK(r.b0[0] == doctest::Approx(kPi).epsilon(1e-6));
    CHECK(r.b0[1] == doctest::Approx(kPi / 2.0 + 0.1 * kPi).epsilon(1e-6));
    CHECK(std::abs(r.gap_t0) < 1e-8);

    // Laplacian gap 2 eps - (-2 eps) = 4 eps, so the rate is 4 eps eta.
    CHECK(r.analytic_rate == doctest::Approx(4.0 * 0.1 * 0.01).epsilon(1e-4));
    CHECK(r.measured_rate == doctest::Approx(r.analytic_rate).epsilon(2e-4));
    CHECK(r.rate_ok);

    // The heteroclinic saddle connection exists at t = 0 and is broken by t1.
    CHECK(r.connected_t0);
    CHECK(r.broken_t1);
    CHECK(r.t1 == doctest::Approx(1e-3));

    SUBCASE("validation") {
        ScenarioConfig bad;
        bad.eps = -0.1;
        CHECK_THROWS(run_instant2d(bad));
        bad.eps = 1.5;
        CHECK_THROWS(run_instant2d(bad));
    }
}

TEST_CASE("break rate is linear in the resistivity") {
    for (double eta : {0.005, 0.02}) {
        ScenarioConfig cfg;
        cfg.eps = 0.1;
        cfg.eta = eta;
        cfg.nu = eta;
        cfg.resolution = 128;
        const auto r = run_instant2d(cfg);
        CHECK(r.saddles_found);
        CHECK(r.measured_rate ==
              doctest::Approx(4.0 * cfg.eps * eta).epsilon(0.02));
    }
}

TEST_CASE("instantaneous 3-D datum") {
    ScenarioConfig cfg;
    cfg.eps = 0.1;
    cfg.resolution = 32;
    const auto r = build_instant3d(cfg);

    // Pullback and the closed-form datum agree to rounding.
    CHECK(r.formula_mismatch <= 1e-12);
    CHECK(r.divergence <= 1e-10);
    CHECK(r.linear_part_mismatch == 0.0);

    // Resonant torus cot x3 = p/q carries a closed (q, p, 0) line.
    REQUIRE(r.resonant_line.closure == Closure::kClosed);
    CHECK(r.resonant_line.winding == std::array<int, 3>{1, 1, 0});
    CHECK(r.resonant_line.arclength ==
          doctest::Approx(kTwoPi * std::sqrt(2.0)).epsilon(1e-3));

    // Off the resonant torus the line is quasi-periodic with the slope of
    // the unsheared field.
    REQUIRE(r.off_resonant_line.closure == Closure::kQuasiPeriodic);
    const double x3 = kPi / 4.0 + 0.5;
    CHECK(r.off_resonant_line.rotation[0] ==
          doctest::Approx(std::sin(x3)).epsilon(1e-3));
    CHECK(r.off_resonant_line.rotation[1] ==
          doctest::Approx(std::cos(x3)).epsilon(1e-3));

    SUBCASE("oblique shear direction") {
        ScenarioConfig ob = cfg;
        ob.p = 2;
        ob.q = 1;
        const auto s = build_instant3d(ob);
        CHECK(s.formula_mismatch <= 1e-12);
        REQUIRE(s.resonant_line.closure == Closure::kClosed);
        CHECK(s.resonant_line.winding == std::array<int, 3>{1, 2, 0});
    }

    SUBCASE("first-order coefficient matches the frozen-velocity flow") {
        ScenarioConfig small = cfg;
        small.resolution = 16;
        small.eps = 0.05;
        small.eta = 1.0;
        const auto s = build_instant3d(small);
        const Grid g(16, 16, 16);
        SpectralField z = SpectralField::vector_field(g);
        z.set_divergence_free(true);
        z.set_zero_mean(true);
        MhdParams p;
        p.nu = 1.0;
        p.eta = 1.0;
        p.freeze_velocity = true;
        p.dt = 1e-4;
        p.t_end = 1e-3;
        const auto run = evolve(make_state(z, s.datum), p, {0.0, 1e-3});
        SpectralField fd = run.snapshots.back().b;
        axpy(fd, -1.0, s.datum);
        fd = scaled(fd, 1.0 / 1e-3);
        SpectralField err = fd;
        axpy(err, -1.0, s.first_order);
        CHECK(max_abs_coef(err) <= 5e-3 * max_abs_coef(s.first_order));
    }

    SUBCASE("validation") {
        ScenarioConfig bad = cfg;
        bad.p = 2;
        bad.q = 4;
        CHECK_THROWS(build_instant3d(bad));
        bad = cfg;
        bad.eps = 1.0;
        CHECK_THROWS(build_instant3d(bad));
    }
}

TEST_CASE("stability decay of perturbed Beltrami data") {
    const Grid g(16, 16, 16);
    const SpectralField b0 = beltrami_field(b0_spec(2, 1.0), g);
    SpectralField zero = SpectralField::vector_field(g);
    zero.set_divergence_free(true);
    zero.set_zero_mean(true);
    MhdParams p;
    p.nu = 1.0;
    p.eta = 1.0;
    p.dt = 1e-2;
    p.t_end = 2.5;
    const auto snaps = uniform_times(2.5, 25);
    const auto ref = evolve(make_state(zero, b0), p, snaps);

    SpectralField bp = b0;
    axpy(bp, 1.0, random_velocity(g, 1e-3, 0, 11));
    const auto per = evolve(make_state(zero, bp), p, snaps);

    const auto rep = verify_stability_decay(ref, per, p.nu, p.eta);
    CHECK(rep.pass);
    REQUIRE(rep.fitted_rates.size() == 4);
    for (double rate : rep.fitted_rates) {
        CHECK(rate >= 0.9);
        CHECK(rate < 3.0);
    }

    SUBCASE("zero perturbation passes trivially") {
        const auto rep0 = verify_stability_decay(ref, ref, p.nu, p.eta);
        CHECK(rep0.pass);
        CHECK(rep0.note == "zero perturbation");
    }
}

TEST_CASE("energy identity and higher norms verifier") {
    const Grid g(32, 32);
    SpectralField zero = SpectralField::vector_field(g);
    zero.set_divergence_free(true);
    zero.set_zero_mean(true);
    MhdParams p;
    p.nu = 1.0;
    p.eta = 1.0;
    p.dt = 1e-3;
    p.t_end = 1.0;

    SUBCASE("eigenfield decays at the dissipative eigenvalue") {
        const auto run =
            evolve(make_state(zero, taylor_field({1, 1, 1, 1.0}, g)), p, {});
        const auto rep = verify_energy_and_hr(run, p.nu, p.eta, 2.0);
        CHECK(rep.pass);
        CHECK(rep.fitted_rates[3] == doctest::Approx(2.0).epsilon(1e-6));
        CHECK(rep.max_energy_residual <=
              1e-4 * run.ledger.energy.front());
    }

    SUBCASE("random data stays bounded in H^3") {
        const auto run = evolve(make_state(random_velocity(g, 0.05, 3, 5),
                                           random_velocity(g, 0.05, 3, 6)),
                                p, {});
        const auto rep = verify_energy_and_hr(run, p.nu, p.eta);
        CHECK(rep.pass);
        CHECK(rep.hr_growth <= 1.01);
    }

    SUBCASE("zero data is identically zero") {
        const auto run = evolve(make_state(zero, zero), p, {});
        const auto rep = verify_energy_and_hr(run, p.nu, p.eta);
        CHECK(rep.pass);
        for (const auto& row : rep.raw.b_norms)
            for (double v : row) CHECK(v == 0.0);
        CHECK(rep.max_energy_residual == 0.0);
    }
}

TEST_CASE("large-viscosity velocity decay structure") {
    ScenarioConfig cfg;
    cfg.nu = 10.0;
    cfg.eta = 1.0;
    cfg.M = 0.5;
    cfg.R = 1.0;
    cfg.T = 1.0;
    cfg.seed = 7;
    cfg.resolution = 64;
    const auto rep = verify_velocity_decay(cfg);
    CHECK(rep.pass);
    CHECK(rep.early_rate >= 0.8 * cfg.nu);
    CHECK(rep.early_rate <= 1.2 * cfg.nu);
    CHECK(rep.fitted_rates[1] >= 1.6 * cfg.nu);
    CHECK(rep.fitted_rates[1] <= 2.4 * cfg.nu);
    CHECK(rep.late_ratio >= 1.6);
    CHECK(rep.late_ratio <= 2.4);
}

TEST_CASE("pure viscous decay is exactly nu") {
    ScenarioConfig pure;
    pure.nu = 10.0;
    pure.eta = 1.0;
    pure.M = 0.0;
    pure.R = 0.0;
    pure.T = 0.5;
    pure.resolution = 32;
    const auto r0 = verify_velocity_decay(pure);
    CHECK(r0.pass);
    CHECK(r0.early_rate == doctest::Approx(10.0).epsilon(1e-6));

    ScenarioConfig bad = pure;
    bad.nu = 2.0;
    CHECK_THROWS(verify_velocity_decay(bad));
}
