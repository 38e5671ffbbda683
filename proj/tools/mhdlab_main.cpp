#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "mhdlab/config.hpp"
#include "mhdlab/fields.hpp"
#include "mhdlab/scenarios.hpp"
#include "mhdlab/snapshot.hpp"
#include "mhdlab/solver.hpp"
#include "mhdlab/spectral.hpp"
#include "mhdlab/topology.hpp"

namespace {

using json = nlohmann::ordered_json;
using namespace mhd;

// The engine is serial; the env var is validated and treated as a cap.
void check_threads_env() {
    const char* v = std::getenv("MHDLAB_THREADS");
    if (v == nullptr) return;
    const std::string s(v);
    std::size_t pos = 0;
    long n = 0;
    try {
        n = std::stol(s, &pos);
    } catch (const std::exception&) {
        pos = 0;
    }
    if (pos != s.size() || n < 1)
        throw std::invalid_argument(
            "MHDLAB_THREADS must be a positive integer");
}

void write_text_atomic(const std::string& path, const std::string& text) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp);
        out << text;
        if (!out) throw std::runtime_error("write failed: " + tmp);
    }
    std::filesystem::rename(tmp, path);
}

void emit_report(const json& j, const std::string& out_path) {
    const std::string text = j.dump(2) + "\n";
    if (out_path.empty())
        std::cout << text;
    else
        write_text_atomic(out_path, text);
}

// --- JSON views -------------------------------------------------------------

const char* kind_name(PointKind k) {
    switch (k) {
        case PointKind::kSaddle: return "saddle";
        case PointKind::kCenter: return "center";
        default: return "degenerate";
    }
}

const char* connection_name(Connection c) {
    switch (c) {
        case Connection::kHeteroclinic: return "heteroclinic";
        case Connection::kHomoclinic: return "homoclinic";
        default: return "none";
    }
}

const char* closure_name(Closure c) {
    switch (c) {
        case Closure::kClosed: return "closed";
        case Closure::kQuasiPeriodic: return "quasi_periodic";
        default: return "undetermined";
    }
}

json point_json(const CriticalPoint& p) {
    json j;
    j["position"] = p.position;
    j["kind"] = kind_name(p.kind);
    j["jacobian"] = {p.jacobian[0], p.jacobian[1]};
    j["residual"] = p.residual;
    return j;
}

json separatrix_json(const SeparatrixReport& s) {
    json j;
    j["source"] = s.source;
    j["terminal"] = s.terminal;
    j["connection"] = connection_name(s.connection);
    j["min_approach"] = s.min_approach;
    return j;
}

json topology_json(const TopologyReport& r) {
    json j;
    j["n_saddles"] = r.n_saddles;
    j["n_centers"] = r.n_centers;
    j["n_degenerate"] = r.n_degenerate;
    j["n_heteroclinic"] = r.n_heteroclinic;
    j["n_homoclinic"] = r.n_homoclinic;
    j["points"] = json::array();
    for (const auto& p : r.points) j["points"].push_back(point_json(p));
    j["separatrices"] = json::array();
    for (const auto& s : r.separatrices)
        j["separatrices"].push_back(separatrix_json(s));
    return j;
}

json field_line_json(const FieldLine& l) {
    json j;
    j["closure"] = closure_name(l.closure);
    j["winding"] = l.winding;
    j["rotation"] = l.rotation;
    j["arclength"] = l.arclength;
    j["samples"] = l.samples.size();
    return j;
}

json verdict_json(const ScenarioVerdict& v) {
    json j;
    j["reconnected"] = v.reconnected;
    j["inconclusive"] = v.inconclusive;
    j["closeness"] = v.closeness;
    j["delta"] = v.delta;
    j["params"] = {{"feasible", v.params.feasible},
                   {"n", v.params.n},
                   {"m", v.params.m},
                   {"delta", v.params.delta},
                   {"resolution", v.params.resolution},
                   {"dt", v.params.dt},
                   {"contamination", v.params.contamination},
                   {"violated", v.params.violated}};
    j["continuation"] = {{"any_lost", v.continuation.any_lost},
                         {"any_merged", v.continuation.any_merged},
                         {"radius", v.continuation.radius},
                         {"points", v.continuation.points.size()}};
    j["report_t0"] = topology_json(v.report_t0);
    j["report_T"] = topology_json(v.report_T);
    j["escalation"] = json::array();
    for (const auto& [nu, closeness] : v.escalation)
        j["escalation"].push_back({{"nu", nu}, {"closeness", closeness}});
    j["note"] = v.note;
    return j;
}

json instant2d_json(const InstantReport2d& r) {
    json j;
    j["saddles_found"] = r.saddles_found;
    j["connected_t0"] = r.connected_t0;
    j["broken_t1"] = r.broken_t1;
    j["rate_ok"] = r.rate_ok;
    j["a0"] = r.a0;
    j["b0"] = r.b0;
    j["gap_t0"] = r.gap_t0;
    j["t1"] = r.t1;
    j["measured_rate"] = r.measured_rate;
    j["analytic_rate"] = r.analytic_rate;
    j["formula_rate"] = r.formula_rate;
    j["min_approach_t1"] = r.min_approach_t1;
    return j;
}

json instant3d_json(const Instant3dReport& r) {
    json j;
    j["formula_mismatch"] = r.formula_mismatch;
    j["divergence"] = r.divergence;
    j["linear_part_mismatch"] = r.linear_part_mismatch;
    j["resonant_line"] = field_line_json(r.resonant_line);
    j["off_resonant_line"] = field_line_json(r.off_resonant_line);
    return j;
}

json estimate_json(const EstimateReport& r) {
    json j;
    j["pass"] = r.pass;
    j["fitted_rates"] = r.fitted_rates;
    j["early_rate"] = r.early_rate;
    j["late_ratio"] = r.late_ratio;
    j["max_energy_residual"] = r.max_energy_residual;
    j["hr_growth"] = r.hr_growth;
    j["note"] = r.note;
    return j;
}

// --- CSV --------------------------------------------------------------------

std::string csv_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string norms_csv(const NormSeries& norms) {
    std::ostringstream out;
    out << "t,norm_label,value\n";
    for (std::size_t i = 0; i < norms.times.size(); ++i) {
        for (int s = 0; s <= norms.order; ++s)
            out << csv_double(norms.times[i]) << ",u_H" << s << ","
                << csv_double(norms.u_norms[i][s]) << "\n";
        for (int s = 0; s <= norms.order; ++s)
            out << csv_double(norms.times[i]) << ",b_H" << s << ","
                << csv_double(norms.b_norms[i][s]) << "\n";
    }
    return out.str();
}

std::string ledger_csv(const EnergyLedger& ledger) {
    std::ostringstream out;
    out << "t,energy,u_dissipation,b_dissipation,cumulative_dissipation\n";
    for (std::size_t i = 0; i < ledger.times.size(); ++i)
        out << csv_double(ledger.times[i]) << ","
            << csv_double(ledger.energy[i]) << ","
            << csv_double(ledger.u_dissipation[i]) << ","
            << csv_double(ledger.b_dissipation[i]) << ","
            << csv_double(ledger.cumulative_dissipation[i]) << "\n";
    return out.str();
}

// --- shared helpers ---------------------------------------------------------

MhdState state_from_snapshot(const Snapshot& snap) {
    SpectralField b = field_from(snap, "b");
    SpectralField u = snap.find("u") != nullptr
                          ? field_from(snap, "u")
                          : SpectralField::vector_field(b.grid());
    u = leray_project(u);
    b = leray_project(b);
    return make_state(std::move(u), std::move(b), snap.time);
}

std::vector<double> uniform_times(double t0, double t1, int count) {
    std::vector<double> times(count);
    for (int i = 0; i < count; ++i)
        times[i] = t0 + (t1 - t0) * i / (count - 1);
    return times;
}

// --- gen --------------------------------------------------------------------

struct GenOptions {
    std::string kind;
    std::string out;
    int modes = 64;
    double amp = 1.0;
    int n = 1, m = 1, family = 1;
    double M = 1.0;
    int L = 2;
    double c = 0.1;
    double eps = 0.1;
    int p = 1, q = 1;
    int n0 = 1;
};

int run_gen(const GenOptions& opt) {
    SpectralField b;
    if (opt.kind == "taylor") {
        b = taylor_field({opt.n, opt.m, opt.family, opt.amp},
                         Grid(opt.modes, opt.modes));
    } else if (opt.kind == "v1") {
        b = stable_taylor_v1(Grid(opt.modes, opt.modes), opt.amp);
    } else if (opt.kind == "beltrami") {
        b = beltrami_field(b0_spec(opt.n0, opt.amp),
                           Grid(opt.modes, opt.modes, opt.modes));
    } else if (opt.kind == "instant2d") {
        ShearSpec shear;
        shear.eps = opt.eps;
        shear.validate();
        b = shear_pullback(
            taylor_field({1, 1, 4, -opt.M}, Grid(opt.modes, opt.modes)), shear);
    } else if (opt.kind == "instant3d") {
        ScenarioConfig cfg;
        cfg.kind = "instant3d";
        cfg.M = opt.M;
        cfg.eps = opt.eps;
        cfg.p = opt.p;
        cfg.q = opt.q;
        cfg.resolution = opt.modes;
        b = build_instant3d(cfg).datum;
    } else if (opt.kind == "reconnect2d") {
        b = reconnection_datum_2d(opt.M, opt.n, opt.m, opt.L, opt.c,
                                  Grid(opt.modes, opt.modes))
                .field;
    } else {
        throw std::invalid_argument("gen: unknown kind '" + opt.kind + "'");
    }
    write_snapshot(snapshot_of(b, 0.0, 0.0, 0.0), opt.out);
    std::cout << "wrote " << opt.out << "\n";
    return 0;
}

// --- evolve -----------------------------------------------------------------

struct EvolveOptions {
    std::string in;
    std::string config;
    std::string snapshots;  // comma list of times; default {t_end}
    std::string out_prefix = "state";
    std::string norms_out;
    std::string energy_out;
};

std::vector<double> parse_time_list(const std::string& text) {
    std::vector<double> times;
    std::istringstream in(text);
    std::string tok;
    while (std::getline(in, tok, ',')) {
        std::size_t pos = 0;
        double t = 0.0;
        try {
            t = std::stod(tok, &pos);
        } catch (const std::exception&) {
            pos = 0;
        }
        if (pos != tok.size())
            throw std::invalid_argument("evolve: bad snapshot time '" + tok +
                                        "'");
        times.push_back(t);
    }
    return times;
}

void append_record(RunRecord& total, const RunRecord& chunk) {
    const bool first = total.norms.times.empty();
    const std::size_t skip = first ? 0 : 1;  // chunk starts at the last row
    const double cum0 = first ? 0.0 : total.ledger.cumulative_dissipation.back();
    for (std::size_t i = skip; i < chunk.norms.times.size(); ++i) {
        total.norms.times.push_back(chunk.norms.times[i]);
        total.norms.u_norms.push_back(chunk.norms.u_norms[i]);
        total.norms.b_norms.push_back(chunk.norms.b_norms[i]);
        total.ledger.times.push_back(chunk.ledger.times[i]);
        total.ledger.energy.push_back(chunk.ledger.energy[i]);
        total.ledger.u_dissipation.push_back(chunk.ledger.u_dissipation[i]);
        total.ledger.b_dissipation.push_back(chunk.ledger.b_dissipation[i]);
        total.ledger.cumulative_dissipation.push_back(
            cum0 + chunk.ledger.cumulative_dissipation[i]);
    }
    if (first) {
        total.norms.order = chunk.norms.order;
        total.ledger.gamma0 = chunk.ledger.gamma0;
        total.dt_base = chunk.dt_base;
    }
    total.steps += chunk.steps;
}

int run_evolve(const EvolveOptions& opt) {
    const ConfigFile cfg = load_config(opt.config);
    const MhdParams params = params_from_config(cfg);
    MhdState state = state_from_snapshot(read_snapshot(opt.in));

    std::vector<double> wanted = opt.snapshots.empty()
                                     ? std::vector<double>{params.t_end}
                                     : parse_time_list(opt.snapshots);
    std::sort(wanted.begin(), wanted.end());
    for (double t : wanted)
        if (t < state.t - 1e-12 || t > params.t_end + 1e-12)
            throw std::invalid_argument(
                "evolve: snapshot time outside [t0, t_end]");

    RunRecord total;
    int index = 0;
    try {
        for (double t : wanted) {
            if (t > state.t + 1e-12) {
                MhdParams chunk = params;
                chunk.t_end = t;
                RunRecord rec = evolve(state, chunk, {t});
                state = rec.snapshots.back();
                append_record(total, rec);
            } else if (total.norms.times.empty()) {
                append_record(total, evolve(state, [&] {
                                  MhdParams chunk = params;
                                  chunk.t_end = state.t;
                                  return chunk;
                              }(), {state.t}));
            }
            std::ostringstream name;
            name << opt.out_prefix << "_" << index++ << ".snap";
            write_snapshot(snapshot_of(state.u, state.b, state.t, params.nu,
                                       params.eta),
                           name.str());
            std::cout << "wrote " << name.str() << " (t=" << state.t << ")\n";
        }
        if (state.t < params.t_end - 1e-12)
            append_record(total, evolve(state, params, {params.t_end}));
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::cerr << "last healthy time t=" << state.t << "\n";
        return 3;
    }
    if (!opt.norms_out.empty())
        write_text_atomic(opt.norms_out, norms_csv(total.norms));
    if (!opt.energy_out.empty())
        write_text_atomic(opt.energy_out, ledger_csv(total.ledger));
    return 0;
}

// --- topo -------------------------------------------------------------------

struct TopoOptions {
    std::string in;
    std::string out;
    bool critical_points = false;
    bool separatrices = false;
    int field_lines = 0;
};

int run_topo(const TopoOptions& opt) {
    const Snapshot snap = read_snapshot(opt.in);
    const SpectralField b = field_from(snap, "b");
    const bool want_planar =
        opt.critical_points || opt.separatrices || opt.field_lines == 0;
    if (snap.dim != 2 && want_planar)
        throw std::invalid_argument(
            "topo: critical points and separatrices need a 2-D snapshot");

    json j;
    j["time"] = snap.time;
    if (max_abs_coef(b) == 0.0) {
        j["empty"] = true;
        emit_report(j, opt.out);
        return 0;
    }
    if (snap.dim == 2) {
        const TopologyReport report = topology_report(b);
        j.update(topology_json(report));
        if (opt.critical_points && !opt.separatrices) j.erase("separatrices");
    }
    if (opt.field_lines > 0) {
        json lines = json::array();
        const double two_pi = 8.0 * std::atan(1.0);
        for (int i = 0; i < opt.field_lines; ++i) {
            const double s = two_pi * (i + 0.5) / opt.field_lines;
            const std::array<double, 3> x0{s, 0.5 * s + 0.3, 0.7 * s + 0.2};
            lines.push_back(field_line_json(
                integrate_field_line(b, x0, 8.0 * two_pi, 2e-3)));
        }
        j["field_lines"] = lines;
    }
    emit_report(j, opt.out);
    return 0;
}

// --- scenario ---------------------------------------------------------------

int run_scenario(const std::string& kind_arg, const std::string& config_path,
                 const std::string& out_path, bool seed_given,
                 std::uint64_t seed) {
    ScenarioConfig cfg = scenario_from_config(load_config(config_path));
    if (!kind_arg.empty()) cfg.kind = kind_arg;
    if (seed_given) cfg.seed = seed;
    if (cfg.kind.empty())
        throw std::invalid_argument("scenario: kind missing (flag or config)");

    json j;
    j["kind"] = cfg.kind;
    if (cfg.kind == "reconnect2d")
        j.update(verdict_json(run_reconnect2d(cfg)));
    else if (cfg.kind == "viscous2d")
        j.update(verdict_json(run_viscous2d(cfg)));
    else if (cfg.kind == "instant2d")
        j.update(instant2d_json(run_instant2d(cfg)));
    else if (cfg.kind == "instant3d")
        j.update(instant3d_json(build_instant3d(cfg)));
    else
        throw std::invalid_argument("scenario: unknown kind '" + cfg.kind +
                                    "'");
    emit_report(j, out_path);
    return 0;
}

// --- verify -----------------------------------------------------------------

int finish_verify(const EstimateReport& report, const std::string& out_path) {
    emit_report(estimate_json(report), out_path);
    std::cout << (report.pass ? "PASS" : "FAIL")
              << (report.note.empty() ? "" : " (" + report.note + ")") << "\n";
    return report.pass ? 0 : 4;
}

int run_verify_oracle() {
    const Grid grid(64, 64);
    const TaylorSpec spec{2, 2, 1, 1.0};
    MhdParams params;
    params.nu = 1.0;
    params.eta = 1.0;
    params.dt = 1e-3;
    params.t_end = 1.0;
    MhdState state = make_state(SpectralField::vector_field(grid),
                                taylor_field(spec, grid));
    const RunRecord run = evolve(state, params, {1.0});
    const SpectralField expected = heat_evolve(
        taylor_field(spec, grid), params.eta, 1.0);
    SpectralField diff = run.snapshots.back().b;
    axpy(diff, -1.0, expected);
    const double rel =
        sobolev_norm(diff, 0) / sobolev_norm(expected, 0);
    std::cout << "relative L2 error " << rel << "\n";
    if (rel <= 1e-8) {
        std::cout << "PASS\n";
        return 0;
    }
    std::cout << "FAIL\n";
    return 4;
}

int run_verify_energy(const std::string& in_path, const std::string& config,
                      const std::string& out_path, double expected_rate) {
    const ConfigFile cfg = load_config(config);
    const MhdParams params = params_from_config(cfg);
    MhdState state = state_from_snapshot(read_snapshot(in_path));
    const RunRecord run =
        evolve(state, params, uniform_times(state.t, params.t_end, 2));
    EstimateReport report =
        verify_energy_and_hr(run, params.nu, params.eta, expected_rate);
    std::cout << "max energy residual " << report.max_energy_residual << "\n";
    return finish_verify(report, out_path);
}

int run_verify_stability(const std::string& ref_path,
                         const std::string& pert_path,
                         const std::string& config,
                         const std::string& out_path) {
    const ConfigFile cfg = load_config(config);
    const MhdParams params = params_from_config(cfg);
    MhdState ref = state_from_snapshot(read_snapshot(ref_path));
    MhdState pert = state_from_snapshot(read_snapshot(pert_path));
    if (std::abs(ref.t - pert.t) > 1e-12)
        throw std::invalid_argument("verify stability: start times differ");
    const std::vector<double> times = uniform_times(ref.t, params.t_end, 26);
    const RunRecord run_ref = evolve(ref, params, times);
    const RunRecord run_pert = evolve(pert, params, times);
    return finish_verify(
        verify_stability_decay(run_ref, run_pert, params.nu, params.eta),
        out_path);
}

int run_verify_velocity(const std::string& config, const std::string& out_path,
                        bool seed_given, std::uint64_t seed) {
    ScenarioConfig cfg = scenario_from_config(load_config(config));
    if (seed_given) cfg.seed = seed;
    return finish_verify(verify_velocity_decay(cfg), out_path);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral incompressible MHD lab"};
    app.require_subcommand(1);

    GenOptions gen;
    auto* cmd_gen = app.add_subcommand("gen", "Generate an initial snapshot");
    cmd_gen->add_option("--kind", gen.kind,
                        "taylor|beltrami|v1|instant2d|instant3d|reconnect2d")
        ->required();
    cmd_gen->add_option("--out", gen.out, "Output snapshot path")->required();
    cmd_gen->add_option("--modes", gen.modes, "Grid resolution per axis");
    cmd_gen->add_option("--amp", gen.amp, "Field amplitude");
    cmd_gen->add_option("--n", gen.n, "Taylor mode n");
    cmd_gen->add_option("--m", gen.m, "Taylor mode m");
    cmd_gen->add_option("--family", gen.family, "Taylor family 1..4");
    cmd_gen->add_option("--M", gen.M, "Construction amplitude");
    cmd_gen->add_option("--L", gen.L, "Perturbation exponent");
    cmd_gen->add_option("--c", gen.c, "Perturbation prefactor");
    cmd_gen->add_option("--eps", gen.eps, "Shear strength");
    cmd_gen->add_option("--p", gen.p, "Shear wavenumber p");
    cmd_gen->add_option("--q", gen.q, "Shear wavenumber q");
    cmd_gen->add_option("--n0", gen.n0, "Beltrami frequency");

    EvolveOptions evo;
    auto* cmd_evolve = app.add_subcommand("evolve", "Advance a snapshot");
    cmd_evolve->add_option("--in", evo.in, "Initial snapshot")->required();
    cmd_evolve->add_option("--config", evo.config, "Solver config")->required();
    cmd_evolve->add_option("--snapshots", evo.snapshots,
                           "Comma list of snapshot times (default t_end)");
    cmd_evolve->add_option("--out-prefix", evo.out_prefix,
                           "Snapshot filename prefix");
    cmd_evolve->add_option("--norms-out", evo.norms_out, "Norm series CSV");
    cmd_evolve->add_option("--energy-out", evo.energy_out, "Energy ledger CSV");

    TopoOptions topo;
    auto* cmd_topo = app.add_subcommand("topo", "Magnetic topology report");
    cmd_topo->add_option("--in", topo.in, "Snapshot path")->required();
    cmd_topo->add_option("--out", topo.out, "Report JSON (default stdout)");
    cmd_topo->add_flag("--critical-points", topo.critical_points,
                       "Critical points only");
    cmd_topo->add_flag("--separatrices", topo.separatrices,
                       "Include separatrices");
    cmd_topo->add_option("--field-lines", topo.field_lines,
                         "Integrate this many field lines");

    std::string scen_kind, scen_config, scen_out;
    std::uint64_t scen_seed = 0;
    auto* cmd_scen = app.add_subcommand("scenario", "Run a named scenario");
    cmd_scen->add_option("kind", scen_kind,
                         "reconnect2d|viscous2d|instant2d|instant3d");
    cmd_scen->add_option("--config", scen_config, "Scenario config")
        ->required();
    cmd_scen->add_option("--out", scen_out, "Report JSON (default stdout)");
    auto* scen_seed_opt =
        cmd_scen->add_option("--seed", scen_seed, "Override config seed");

    auto* cmd_verify = app.add_subcommand("verify", "Estimate verifiers");
    cmd_verify->require_subcommand(1);
    auto* v_oracle = cmd_verify->add_subcommand(
        "oracle", "Exact Taylor-decay comparison");
    std::string ve_in, ve_config, ve_out;
    double ve_rate = 0.0;
    auto* v_energy = cmd_verify->add_subcommand("energy", "Energy identity");
    v_energy->add_option("--in", ve_in, "Initial snapshot")->required();
    v_energy->add_option("--config", ve_config, "Solver config")->required();
    v_energy->add_option("--out", ve_out, "Report JSON (default stdout)");
    v_energy->add_option("--expected-rate", ve_rate,
                         "Assert this H3 decay rate");
    std::string vs_ref, vs_pert, vs_config, vs_out;
    auto* v_stab = cmd_verify->add_subcommand("stability", "Perturbation decay");
    v_stab->add_option("--in", vs_ref, "Reference snapshot")->required();
    v_stab->add_option("--perturbed", vs_pert, "Perturbed snapshot")
        ->required();
    v_stab->add_option("--config", vs_config, "Solver config")->required();
    v_stab->add_option("--out", vs_out, "Report JSON (default stdout)");
    std::string vv_config, vv_out;
    std::uint64_t vv_seed = 0;
    auto* v_vel = cmd_verify->add_subcommand("velocity-decay",
                                             "Large-viscosity structure");
    v_vel->add_option("--config", vv_config, "Scenario config")->required();
    v_vel->add_option("--out", vv_out, "Report JSON (default stdout)");
    auto* vv_seed_opt =
        v_vel->add_option("--seed", vv_seed, "Override config seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        check_threads_env();
        if (cmd_gen->parsed()) return run_gen(gen);
        if (cmd_evolve->parsed()) return run_evolve(evo);
        if (cmd_topo->parsed()) return run_topo(topo);
        if (cmd_scen->parsed())
            return run_scenario(scen_kind, scen_config, scen_out,
                                scen_seed_opt->count() > 0, scen_seed);
        if (v_oracle->parsed()) return run_verify_oracle();
        if (v_energy->parsed())
            return run_verify_energy(ve_in, ve_config, ve_out, ve_rate);
        if (v_stab->parsed())
            return run_verify_stability(vs_ref, vs_pert, vs_config, vs_out);
        if (v_vel->parsed())
            return run_verify_velocity(vv_config, vv_out,
                                       vv_seed_opt->count() > 0, vv_seed);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::runtime_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
