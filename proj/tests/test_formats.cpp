#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mhdlab/config.hpp"
#include "mhdlab/fields.hpp"
#include "mhdlab/snapshot.hpp"
#include "mhdlab/spectral.hpp"

using namespace mhd;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

std::filesystem::path temp_file(const char* name) {
    return std::filesystem::temp_directory_path() / name;
}

}  // namespace

TEST_CASE("snapshot round trip is bit exact") {
    const Grid g(16, 16);
    const SpectralField b = taylor_field({2, 3, 2, 0.7}, g);
    const SpectralField u = taylor_field({1, 1, 1, -0.31}, g);
    const Snapshot snap = snapshot_of(u, b, 0.125, 1e-3, 2e-4);

    const auto p1 = temp_file("mhdlab_rt1.snap");
    const auto p2 = temp_file("mhdlab_rt2.snap");
    write_snapshot(snap, p1.string());
    const Snapshot back = read_snapshot(p1.string());

    CHECK(back.dim == snap.dim);
    CHECK(back.modes == snap.modes);
    CHECK(back.time == snap.time);
    CHECK(back.nu == snap.nu);
    CHECK(back.eta == snap.eta);
    REQUIRE(back.fields.size() == snap.fields.size());
    for (std::size_t f = 0; f < snap.fields.size(); ++f) {
        CHECK(back.fields[f].name == snap.fields[f].name);
        REQUIRE(back.fields[f].samples.size() == snap.fields[f].samples.size());
        for (std::size_t c = 0; c < snap.fields[f].samples.size(); ++c)
            CHECK(back.fields[f].samples[c] == snap.fields[f].samples[c]);
    }

    // Re-serialize: identical bytes on disk.
    write_snapshot(back, p2.string());
    CHECK(slurp(p1.string()) == slurp(p2.string()));

    // Interpolation recovers the band-limited coefficients.
    SpectralField diff = field_from(back, "b");
    axpy(diff, -1.0, b);
    CHECK(max_abs_coef(diff) <= 1e-14);

    std::filesystem::remove(p1);
    std::filesystem::remove(p2);
}

TEST_CASE("snapshot validation") {
    const Grid g(8, 8);
    Snapshot snap = snapshot_of(taylor_field({1, 1, 1, 1.0}, g), 0.0, 0.0, 0.0);
    const auto path = temp_file("mhdlab_bad.snap");

    SUBCASE("payload length is checked") {
        write_snapshot(snap, path.string());
        std::ofstream app(path, std::ios::binary | std::ios::app);
        app << 'x';
        app.close();
        CHECK_THROWS_WITH_AS(read_snapshot(path.string()),
                             "read_snapshot: trailing bytes",
                             std::invalid_argument);
    }
    SUBCASE("field names restricted") {
        snap.fields[0].name = "w";
        CHECK_NOTHROW(write_snapshot(snap, path.string()));
        CHECK_THROWS_AS(read_snapshot(path.string()), std::invalid_argument);
    }
    SUBCASE("magic required") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << "NOTASNAP\n";
        out.close();
        CHECK_THROWS_WITH_AS(read_snapshot(path.string()),
                             "read_snapshot: bad magic",
                             std::invalid_argument);
    }
    SUBCASE("component count must equal dim") {
        snap.fields[0].samples.pop_back();
        CHECK_THROWS_AS(write_snapshot(snap, path.string()),
                        std::invalid_argument);
    }
    std::filesystem::remove(path);
}

TEST_CASE("config parsing") {
    const ConfigFile cfg = parse_config(
        "# header comment\n"
        "kind = reconnect2d\n"
        "M = 2.5   # inline comment\n"
        "n = 2\n"
        "seed = 12345678901234\n"
        "dealias = false\n"
        "\n");
    CHECK(cfg.get_string("kind", "") == "reconnect2d");
    CHECK(cfg.get_double("M", 0.0) == 2.5);
    CHECK(cfg.get_int("n", 0) == 2);
    CHECK(cfg.get_uint64("seed", 0) == 12345678901234ull);
    CHECK(cfg.get_bool("dealias", true) == false);
    CHECK(cfg.get_double("eta", 7.0) == 7.0);  // fallback
    CHECK(cfg.has("n"));
    CHECK_FALSE(cfg.has("m"));

    SUBCASE("rejects malformed input") {
        CHECK_THROWS_AS(parse_config("bogus_key = 1\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("nu\n"), std::invalid_argument);
        CHECK_THROWS_AS(parse_config("nu = 1\nnu = 2\n"),
                        std::invalid_argument);
        CHECK_THROWS_AS(parse_config("nu = fast\n").get_double("nu", 0.0),
                        std::invalid_argument);
        CHECK_THROWS_AS(parse_config("n = 1.5\n").get_int("n", 0),
                        std::invalid_argument);
    }
}

TEST_CASE("typed config views") {
    const ConfigFile cfg = parse_config(
        "kind = instant2d\n"
        "M = 1.5\n"
        "T = 0.25\n"
        "nu = 4\n"
        "eta = 0.5\n"
        "eps = 0.2\n"
        "resolution = 96\n"
        "dt = 0.002\n"
        "t_end = 0.25\n"
        "integrator = etdrk4\n"
        "freeze_velocity = true\n");
    const ScenarioConfig scen = scenario_from_config(cfg);
    CHECK(scen.kind == "instant2d");
    CHECK(scen.M == 1.5);
    CHECK(scen.T == 0.25);
    CHECK(scen.eps == 0.2);
    CHECK(scen.resolution == 96);
    CHECK(scen.L == 2);  // default preserved
    const MhdParams params = params_from_config(cfg);
    CHECK(params.nu == 4.0);
    CHECK(params.eta == 0.5);
    CHECK(params.dt == 0.002);
    CHECK(params.t_end == 0.25);
    CHECK(params.integrator == Integrator::kETDRK4);
    CHECK(params.freeze_velocity);

    CHECK_THROWS_AS(params_from_config(parse_config("integrator = euler\n")),
                    std::invalid_argument);
    CHECK_THROWS_AS(params_from_config(parse_config("eta = 0\n")),
                    std::invalid_argument);
}
