#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mhdlab/fields.hpp"
#include "mhdlab/topology.hpp"
#include "test_util.hpp"

using namespace mhd;
using mhd::testutil::rel_coef_error;

namespace {
constexpr double pi = std::numbers::pi;

bool near_lattice(const std::array<double, 2>& p, double stride1,
                  double stride2, double off1, double off2, double tol) {
    const auto close = [&](double x, double stride, double off) {
        const double q = (x - off) / stride;
        return std::abs(q - std::round(q)) * stride < tol;
    };
    return close(p[0], stride1, off1) && close(p[1], stride2, off2);
}
}  // namespace

TEST_CASE("classify") {
    SUBCASE("saddle matrix diag(nm, -nm)") {
        for (int nm : {1, 4, 12}) {
            const Mat2 j{{{double(nm), 0.0}, {0.0, double(-nm)}}};
            CHECK(classify(j) == PointKind::kSaddle);
        }
    }
    SUBCASE("center matrix (0, -m^2; n^2, 0)") {
        const Mat2 j{{{0.0, -9.0}, {4.0, 0.0}}};
        CHECK(classify(j) == PointKind::kCenter);
    }
    SUBCASE("zero matrix is degenerate") {
        CHECK(classify(Mat2{{{0.0, 0.0}, {0.0, 0.0}}}) ==
              PointKind::kDegenerate);
    }
    SUBCASE("positive rescaling preserves the kind") {
        const Mat2 j{{{2.0, 1.0}, {3.0, -2.0}}};
        Mat2 js = j;
        for (auto& row : js)
            for (double& e : row) e *= 37.5;
        CHECK(classify(j) == classify(js));
    }
}

TEST_CASE("find_critical_points on Taylor fields") {
    SUBCASE("V^1_22 has the 32-point lattice") {
        const Grid g(64, 64);
        const auto pts = find_critical_points(taylor_field({2, 2, 1, 1.0}, g));
        REQUIRE(pts.size() == 32);
        int saddles = 0, centers = 0;
        for (const auto& cp : pts) {
            CHECK(cp.residual <= 1e-10 * 8.0);
            if (cp.kind == PointKind::kSaddle) {
                ++saddles;
                CHECK(near_lattice(cp.position, pi / 2, pi / 2, 0.0, 0.0, 1e-9));
                const double det = cp.jacobian[0][0] * cp.jacobian[1][1] -
                                   cp.jacobian[0][1] * cp.jacobian[1][0];
                // det grad V_N at x* is -n^2 m^2 = -16
                CHECK(det == doctest::Approx(-16.0).epsilon(1e-9));
            } else {
                REQUIRE(cp.kind == PointKind::kCenter);
                ++centers;
                CHECK(near_lattice(cp.position, pi / 2, pi / 2, pi / 4, pi / 4,
                                   1e-9));
            }
        }
        CHECK(saddles == 16);
        CHECK(centers == 16);
    }

    SUBCASE("8nm census for a sample of (n, m)") {
        for (auto [n, m] : {std::pair{1, 1}, {1, 3}, {3, 2}, {4, 4}}) {
            const int res = std::max(32, 16 * std::max(n, m));
            const Grid g(res, res);
            const auto pts =
                find_critical_points(taylor_field({n, m, 2, 1.0}, g));
            CHECK(pts.size() == static_cast<std::size_t>(8 * n * m));
            int saddles = 0;
            for (const auto& cp : pts)
                saddles += cp.kind == PointKind::kSaddle;
            CHECK(saddles == 4 * n * m);
        }
    }

    SUBCASE("V1 has 4 points") {
        const Grid g(32, 32);
        const auto pts = find_critical_points(stable_taylor_v1(g));
        REQUIRE(pts.size() == 4);
        int saddles = 0;
        for (const auto& cp : pts) {
            if (cp.kind == PointKind::kSaddle) {
                ++saddles;
                // saddles at (0,0) and (pi,pi)
                CHECK(near_lattice(cp.position, pi, pi, 0.0, 0.0, 1e-9));
                CHECK(std::abs(std::remainder(cp.position[0] - cp.position[1],
                                              kTwoPi)) <= 1e-9);
            }
        }
        CHECK(saddles == 2);
    }

    SUBCASE("constant nonzero field has none") {
        const Grid g(16, 16);
        SpectralField f = SpectralField::vector_field(g);
        f.mode(0, 0, 0) = cd{1.0, 0.0};
        CHECK(find_critical_points(f).empty());
    }

    SUBCASE("zero field is rejected") {
        const Grid g(16, 16);
        CHECK_THROWS(find_critical_points(SpectralField::vector_field(g)));
    }
}

TEST_CASE("continue_critical_points") {
    const Grid g(64, 64);
    const double M = 1.0, c = 0.1;
    const int n = 2, m = 2, L = 3;
    const double N = std::sqrt(8.0);
    const TaylorSpec base{n, m, 1, M / N};

    SUBCASE("zero perturbation fixes the lattice") {
        const auto rep =
            continue_critical_points(base, taylor_field(base, g), L);
        CHECK(rep.points.size() == 32);
        CHECK_FALSE(rep.any_lost);
        for (const auto& p : rep.points) {
            CHECK(std::hypot(p.position[0] - p.lattice[0],
                             p.position[1] - p.lattice[1]) <= 1e-12);
        }
    }

    SUBCASE("admissible datum keeps all 8nm points separated") {
        const auto [datum, delta] = reconnection_datum_2d(M, n, m, L, c, g);
        const auto rep = continue_critical_points(base, datum, L);
        CHECK(rep.points.size() == 32);
        CHECK_FALSE(rep.any_lost);
        CHECK_FALSE(rep.any_merged);
        CHECK(rep.min_pairwise >= pi / (2.0 * std::max(n, m)));
        for (const auto& p : rep.points) {
            CHECK(std::hypot(
                      std::remainder(p.position[0] - p.lattice[0], kTwoPi),
                      std::remainder(p.position[1] - p.lattice[1], kTwoPi)) <=
                  rep.radius);
            CHECK(p.kind != PointKind::kDegenerate);
        }
    }

    SUBCASE("oversized perturbation loses lattice points") {
        const double delta0 = c * M / std::pow(N, L + 1);
        SpectralField datum = taylor_field(base, g);
        axpy(datum, 1.0, stable_taylor_v1(g, 100.0 * delta0));
        const auto rep = continue_critical_points(base, datum, L);
        CHECK((rep.any_lost || rep.any_merged));
    }

    SUBCASE("axis base is rejected") {
        CHECK_THROWS(continue_critical_points({2, 0, 1, 1.0},
                                              taylor_field(base, g), L));
    }
}

TEST_CASE("stream_function") {
    const Grid g(64, 64);

    SUBCASE("round trip grad_perp(psi) = f") {
        const SpectralField f = mhd::testutil::random_divfree_field(g, 77);
        const SpectralField psi = stream_function(f);
        SpectralField gp = SpectralField::vector_field(g);
        gp.comp(0) = differentiate(psi, 1, 1).comp(0);
        gp.comp(1) = scaled(differentiate(psi, 0, 1), -1.0).comp(0);
        CHECK(rel_coef_error(gp, f) <= 1e-12);
    }

    SUBCASE("Taylor stream function closed form") {
        const int n = 2, m = 3;
        const SpectralField psi =
            stream_function(taylor_field({n, m, 1, 1.0}, g));
        for (double x1 : {0.4, 2.0})
            for (double x2 : {1.0, 3.3})
                CHECK(evaluate_at(psi, {x1, x2, 0.0})[0] ==
                      doctest::Approx(std::sin(n * x1) * std::sin(m * x2))
                          .epsilon(1e-12));
    }
}

TEST_CASE("integrate_field_line") {
    SUBCASE("B0 line through the origin winds once in x2") {
        const Grid g3(16, 16, 16);
        const SpectralField b0 = beltrami_field(b0_spec(1), g3);
        const FieldLine ln =
            integrate_field_line(b0, {0.0, 0.0, 0.0}, 4 * kTwoPi, 5e-3);
        CHECK(ln.closure == Closure::kClosed);
        CHECK(ln.winding == std::array<int, 3>{0, 1, 0});
        CHECK(ln.arclength == doctest::Approx(kTwoPi).epsilon(1e-6));
        const auto w = winding_vector(ln);
        REQUIRE(w.has_value());
        CHECK((*w)[1] == 1);
    }

    SUBCASE("irrational-slope line on a B0 torus is quasi-periodic") {
        const Grid g3(16, 16, 16);
        const SpectralField b0 = beltrami_field(b0_spec(1), g3);
        const FieldLine ln =
            integrate_field_line(b0, {0.0, 0.0, 1.0}, 6 * kTwoPi, 5e-3);
        CHECK(ln.closure == Closure::kQuasiPeriodic);
        CHECK(ln.rotation[0] == doctest::Approx(std::sin(1.0)).epsilon(1e-6));
        CHECK(ln.rotation[1] == doctest::Approx(std::cos(1.0)).epsilon(1e-6));
        CHECK_FALSE(winding_vector(ln).has_value());
    }

    SUBCASE("loop around a V1 center is contractible") {
        const Grid g(32, 32);
        const FieldLine ln = integrate_field_line(
            stable_taylor_v1(g), {0.0, pi - 0.5, 0.0}, 8 * kTwoPi, 2e-3);
        CHECK(ln.closure == Closure::kClosed);
        CHECK(ln.winding == std::array<int, 3>{0, 0, 0});
    }

    SUBCASE("V^1_11 loop conserves the stream function") {
        const Grid g(32, 32);
        const SpectralField f = taylor_field({1, 1, 1, 1.0}, g);
        const SpectralField psi = stream_function(f);
        const FieldLine ln = integrate_field_line(
            f, {pi / 2, pi / 2 + 0.1, 0.0}, 8 * kTwoPi, 2e-3);
        CHECK(ln.closure == Closure::kClosed);
        const double psi0 = evaluate_at(psi, {pi / 2, pi / 2 + 0.1, 0.0})[0];
        double drift = 0.0;
        for (const auto& x : ln.samples)
            drift = std::max(drift,
                             std::abs(evaluate_at(psi, x)[0] - psi0));
        CHECK(drift <= 1e-8);
    }

    SUBCASE("winding is stable under step halving") {
        const Grid g(32, 32);
        const SpectralField f = taylor_field({1, 1, 1, 1.0}, g);
        const FieldLine a = integrate_field_line(
            f, {pi / 2, pi / 2 + 0.3, 0.0}, 8 * kTwoPi, 2e-3);
        const FieldLine b = integrate_field_line(
            f, {pi / 2, pi / 2 + 0.3, 0.0}, 8 * kTwoPi, 1e-3);
        CHECK(a.closure == Closure::kClosed);
        CHECK(a.winding == b.winding);
    }

    SUBCASE("stagnation start is rejected") {
        const Grid g(32, 32);
        CHECK_THROWS(integrate_field_line(stable_taylor_v1(g),
                                          {0.0, 0.0, 0.0}, 1.0, 1e-3));
    }
}

TEST_CASE("trace_separatrices") {
    const Grid g(64, 64);

    SUBCASE("heteroclinic web of the -V^4_11 base") {
        const SpectralField base = taylor_field({1, 1, 4, -1.0}, g);
        const auto pts = find_critical_points(base);
        const auto reps = trace_separatrices(base, pts);
        int het = 0;
        for (const auto& r : reps) het += r.connection == Connection::kHeteroclinic;
        CHECK(het > 0);
        for (const auto& r : reps)
            CHECK(r.connection != Connection::kHomoclinic);
    }

    SUBCASE("V1 saddles are self-connected only") {
        const SpectralField v1 = stable_taylor_v1(g);
        const auto pts = find_critical_points(v1);
        const auto reps = trace_separatrices(v1, pts);
        REQUIRE(reps.size() == 8);  // 2 saddles x 4 branches
        for (const auto& r : reps) {
            CHECK(r.connection == Connection::kHomoclinic);
            CHECK(r.terminal == r.source);
        }
    }

    SUBCASE("no saddles, no reports") {
        const SpectralField v1 = stable_taylor_v1(g);
        auto pts = find_critical_points(v1);
        pts.erase(std::remove_if(pts.begin(), pts.end(),
                                 [](const CriticalPoint& cp) {
                                     return cp.kind == PointKind::kSaddle;
                                 }),
                  pts.end());
        CHECK(trace_separatrices(v1, pts).empty());
    }
}

TEST_CASE("saddle_value_gap") {
    const Grid g(64, 64);
    const SpectralField psi = stream_function(taylor_field({1, 1, 4, -1.0}, g));

    SUBCASE("saddles on a common separatrix level have zero gap") {
        CHECK(saddle_value_gap(psi, {0.0, pi / 2}, {pi, pi / 2}) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("antisymmetry") {
        const std::array<double, 2> a{0.3, 1.0}, b{2.0, 4.0};
        CHECK(saddle_value_gap(psi, a, b) ==
              doctest::Approx(-saddle_value_gap(psi, b, a)));
    }
    SUBCASE("vector input is rejected") {
        CHECK_THROWS(saddle_value_gap(taylor_field({1, 1, 1, 1.0}, g),
                                      {0.0, 0.0}, {1.0, 1.0}));
    }
}

TEST_CASE("topology_report") {
    const Grid g(64, 64);

    SUBCASE("V^1_22 and V1 are inequivalent") {
        const TopologyReport a = topology_report(taylor_field({2, 2, 1, 1.0}, g));
        const TopologyReport b = topology_report(stable_taylor_v1(Grid(32, 32)));
        CHECK(a.n_saddles == 16);
        CHECK(a.n_centers == 16);
        CHECK(b.n_saddles == 2);
        CHECK(b.n_centers == 2);
        CHECK_FALSE(reports_equivalent(a, b));
    }

    SUBCASE("positive rescaling changes nothing") {
        const SpectralField f = taylor_field({1, 2, 3, 1.0}, g);
        const TopologyReport a = topology_report(f);
        const TopologyReport b = topology_report(scaled(f, 41.0));
        CHECK(reports_equivalent(a, b));
        CHECK(a.points.size() == b.points.size());
    }

    SUBCASE("shear pullback preserves the counts") {
        const Grid gp(256, 256);
        const SpectralField base = taylor_field({1, 1, 4, -1.0}, gp);
        ShearSpec shear;
        shear.eps = 0.1;
        const TopologyReport a = topology_report(base);
        const TopologyReport b = topology_report(shear_pullback(base, shear));
        CHECK(reports_equivalent(a, b));
    }
}
