// Command-line front end: forward modelling, inverse recovery, wave
// simulation, interval-lattice queries and the self-check suite.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <slwave/slwave.hpp>

namespace fs = std::filesystem;
using slwave::json;

namespace {

slwave::Potential make_potential(const std::string& qspec, double l, int n) {
    if (fs::exists(qspec))
        return slwave::Potential(slwave::read_grid_function_csv(qspec, "q"));
    slwave::Grid g = slwave::build_grid(l, n);
    return slwave::Potential(slwave::parse_potential_spec(qspec, g));
}

double resolve_delta(double delta, const slwave::Grid& g) {
    return delta > 0.0 ? delta : slwave::default_delta(g);
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw slwave::io_error("cannot create directory '" + dir + "'");
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

int run_forward(const std::string& qspec, double l, int n, double delta, const std::string& out) {
    slwave::Potential p = make_potential(qspec, l, n);
    delta = resolve_delta(delta, p.grid());
    slwave::ForwardModel fm = slwave::run_forward(p, delta);
    ensure_dir(out);
    slwave::write_grid_function_csv(join_path(out, "rho.csv"), fm.gauge.rho, "rho");
    slwave::write_matrix2_csv(join_path(out, "T.csv"), fm.transform.T);
    slwave::write_matrix2_csv(join_path(out, "P.csv"), fm.coeffs.P);
    slwave::write_matrix2_csv(join_path(out, "Q.csv"), fm.coeffs.Q);
    slwave::write_matrix2_csv(join_path(out, "P1.csv"), fm.coeffs.P1);
    json meta{{"format", "slwave-forward"},
              {"version", 1},
              {"length", p.grid().length},
              {"nodes", p.grid().count},
              {"delta", delta},
              {"retained_nodes", fm.coeffs.P.grid().count},
              {"q", qspec},
              {"gauge", "e(length/2) = 1, e'(length/2) = 0"},
              {"image_basis", "components are coefficients in the Cauchy basis (e1, e2) at x = 0"},
              {"notes", "P, Q, P1 live on [0, length/2 - delta]; the midpoint zone is excluded"}};
    slwave::write_json_file(join_path(out, "meta.json"), meta);
    std::cout << "forward: wrote " << out << " (retained " << fm.coeffs.P.grid().count
              << " of " << (p.grid().midpoint_index() + 1) << " half-grid nodes)\n";
    return 0;
}

int run_inverse(const std::string& in, const std::string& out) {
    json meta = slwave::read_json_file(join_path(in, "meta.json"));
    if (!meta.contains("length") || !meta.contains("delta"))
        throw slwave::io_error("meta.json: missing required fields 'length' and 'delta'");
    const double l = meta.at("length").get<double>();
    const double delta = meta.at("delta").get<double>();
    slwave::Matrix2Field P = slwave::read_matrix2_csv(join_path(in, "P.csv"));
    slwave::Matrix2Field Q = slwave::read_matrix2_csv(join_path(in, "Q.csv"));
    std::optional<slwave::Matrix2Field> P1;
    if (fs::exists(join_path(in, "P1.csv")))
        P1 = slwave::read_matrix2_csv(join_path(in, "P1.csv"));
    slwave::RecoveryResult rec = slwave::recover_potential(P, Q, l, delta, P1);
    ensure_dir(out);
    slwave::write_grid_function_csv(join_path(out, "q_plus.csv"), rec.q_plus, "q");
    slwave::write_grid_function_csv(join_path(out, "q_minus.csv"), rec.q_minus, "q");
    json diag = slwave::diagnostics_to_json(rec.diagnostics);
    diag["note"] = "candidates agree up to the reflection x -> length - x";
    slwave::write_json_file(join_path(out, "diagnostics.json"), diag);
    std::cout << "inverse: wrote " << out << " (max off-diagonal residual "
              << slwave::format_double(rec.diagnostics.max_offdiag_residual) << ")\n";
    return 0;
}

int run_roundtrip(const std::string& qspec, double l, int n, double delta) {
    slwave::Potential p = make_potential(qspec, l, n);
    delta = resolve_delta(delta, p.grid());
    slwave::RecoveryResult rec = slwave::run_roundtrip(p, delta);
    std::cout << "roundtrip_error=" << slwave::format_double(slwave::roundtrip_error(p.q(), rec))
              << "\n";
    return 0;
}

slwave::BoundaryControl default_pulse(int steps, double dt) {
    std::vector<double> f0(static_cast<size_t>(steps) + 1, 0.0), fl(f0);
    const double pi = 3.14159265358979323846;
    int kend = std::max(8, steps / 4);
    for (int k = 4; k <= std::min(kend, steps); ++k) {
        double t = static_cast<double>(k - 4) / (kend - 4);
        f0[static_cast<size_t>(k)] = std::sin(pi * t) * std::sin(pi * t);
    }
    return slwave::BoundaryControl(dt, std::move(f0), std::move(fl));
}

int run_simulate(const std::string& qspec, double l, int n, double cfl, double T,
                 const std::string& control_path, std::vector<double> snapshots,
                 const std::string& dump, const std::string& out) {
    slwave::Potential p = make_potential(qspec, l, n);
    const double dt = cfl * p.grid().spacing();
    if (T <= 0.0) T = 0.5 * p.grid().length;
    const int steps = std::max(4, static_cast<int>(std::lround(T / dt)));
    const double Ta = steps * dt; // snap to the time grid
    slwave::BoundaryControl c =
        control_path.empty() ? default_pulse(steps, dt) : slwave::read_control_csv(control_path);
    slwave::WaveField w = slwave::simulate_boundary_control(p, c, Ta, cfl);
    ensure_dir(out);
    if (snapshots.empty()) snapshots.push_back(Ta);
    json snaps = json::array();
    for (size_t s = 0; s < snapshots.size(); ++s) {
        int k = std::clamp(static_cast<int>(std::lround(snapshots[s] / dt)), 0, steps);
        std::string name = "snapshot_" + std::to_string(s) + ".csv";
        slwave::write_grid_function_csv(join_path(out, name), w.slice(k), "u");
        json sup = json::array();
        for (auto [a, b] : slwave::support_bounds(w, k * dt)) sup.push_back(json::array({a, b}));
        snaps.push_back(json{{"file", name}, {"t", k * dt}, {"support", sup}});
    }
    json info{{"format", "slwave-simulate"}, {"version", 1},    {"length", p.grid().length},
              {"nodes", n},                  {"cfl", cfl},      {"dt", dt},
              {"steps", steps},              {"duration", Ta},  {"q", qspec},
              {"snapshots", snaps}};
    slwave::write_json_file(join_path(out, "support.json"), info);
    if (!dump.empty()) slwave::write_wave_field_binary(join_path(out, dump), w);
    std::cout << "simulate: " << steps << " steps, dt=" << slwave::format_double(dt) << ", wrote "
              << out << "\n";
    return 0;
}

slwave::ElementarySet set_from_query(const json& j) { return slwave::elementary_set_from_json(j); }

json run_spectrum_query(const json& q) {
    if (!q.contains("op")) throw slwave::io_error("query: missing 'op'");
    const std::string op = q.at("op").get<std::string>();
    auto need = [&](const char* key) -> const json& {
        if (!q.contains(key)) throw slwave::io_error(std::string("query: missing '") + key + "'");
        return q.at(key);
    };
    if (op == "atom_set") {
        slwave::Atom a{need("x").get<double>()};
        return slwave::elementary_set_to_json(
            slwave::atom_set(a, need("t").get<double>(), need("l").get<double>()));
    }
    if (op == "eikonal") {
        slwave::Atom a{need("x").get<double>()};
        slwave::Grid g = slwave::build_grid(need("l").get<double>(), need("n").get<int>());
        slwave::GridFunction f = slwave::eikonal_profile(a, g);
        json xs = json::array(), fs = json::array();
        for (int i = 0; i < g.count; ++i) {
            xs.push_back(g.node(i));
            fs.push_back(f[i]);
        }
        return json{{"x", xs}, {"f", fs}};
    }
    if (op == "distance")
        return json{{"distance", slwave::spectrum_distance({need("x1").get<double>()},
                                                           {need("x2").get<double>()})}};
    if (op == "neighborhood")
        return slwave::elementary_set_to_json(
            slwave::neighborhood(set_from_query(need("a")), need("t").get<double>()));
    if (op == "join")
        return slwave::elementary_set_to_json(
            slwave::lattice_join(set_from_query(need("a")), set_from_query(need("b"))));
    if (op == "meet")
        return slwave::elementary_set_to_json(
            slwave::lattice_meet(set_from_query(need("a")), set_from_query(need("b"))));
    if (op == "complement")
        return slwave::elementary_set_to_json(slwave::lattice_complement(set_from_query(need("a"))));
    if (op == "symdiff_measure")
        return json{{"measure",
                     slwave::symdiff_measure(set_from_query(need("a")), set_from_query(need("b")))}};
    if (op == "measure") return json{{"measure", set_from_query(need("a")).measure()}};
    throw slwave::io_error("query: unknown op '" + op + "'");
}

int run_spectrum(const std::string& query_path, const std::string& out) {
    json q = slwave::read_json_file(query_path);
    json result = run_spectrum_query(q);
    if (out.empty())
        std::cout << result.dump(2) << "\n";
    else
        slwave::write_json_file(out, result);
    return 0;
}

int run_verify(const std::string& qspec, double l, int n, double cfl, double delta) {
    slwave::Potential p = make_potential(qspec, l, n);
    slwave::VerifyReport rep = slwave::run_verify(p, cfl, delta);
    int passed = 0;
    for (const auto& c : rep.checks) {
        std::printf("%s  %-46s %12.4g %s %.4g\n", c.pass ? "PASS" : "FAIL", c.name.c_str(),
                    c.measured, c.at_least ? ">=" : "<=", c.threshold);
        passed += c.pass ? 1 : 0;
    }
    std::printf("verify: %d/%d checks passed\n", passed, static_cast<int>(rep.checks.size()));
    return rep.ok ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward and inverse toolkit for the one-dimensional operator -u'' + q u"};
    app.require_subcommand(1);

    std::string qspec = "trig:0,1,3";
    double l = 1.0, cfl = 0.95, delta = 0.0, T = 0.0;
    int n = 2001;
    std::string out, in, control, dump, query;
    std::vector<double> snapshots;

    auto add_q = [&](CLI::App* cmd, bool with_grid = true) {
        cmd->add_option("--q", qspec, "potential: const:c | poly:a0,a1,... | trig:a,b,k | CSV path");
        if (with_grid) {
            cmd->add_option("--l", l, "interval length")->check(CLI::PositiveNumber);
            cmd->add_option("--n", n, "node count (odd)")->check(CLI::Range(5, 2000001));
        }
    };

    CLI::App* fwd = app.add_subcommand("forward", "compute the transform and model coefficients");
    add_q(fwd);
    fwd->add_option("--delta", delta, "half-width of the excluded midpoint zone");
    fwd->add_option("--out", out, "output directory")->required();

    CLI::App* inv = app.add_subcommand("inverse", "recover the potential from coefficient files");
    inv->add_option("--in", in, "directory with P.csv, Q.csv, meta.json")->required();
    inv->add_option("--out", out, "output directory")->required();

    CLI::App* rt = app.add_subcommand("roundtrip", "forward pass then inverse recovery");
    add_q(rt);
    rt->add_option("--delta", delta, "half-width of the excluded midpoint zone");

    CLI::App* sim = app.add_subcommand("simulate", "boundary-controlled wave evolution");
    add_q(sim);
    sim->add_option("--cfl", cfl, "Courant number in (0, 1]")->check(CLI::Range(1e-6, 1.0));
    sim->add_option("--T", T, "final time (default length/2, snapped to the time grid)");
    sim->add_option("--controls", control, "boundary control CSV (t,f0,fl); default: ramped pulse");
    sim->add_option("--snapshots", snapshots, "comma-separated times to dump as CSV slices")
        ->delimiter(',');
    sim->add_option("--dump", dump, "binary space-time dump file name (inside --out)");
    sim->add_option("--out", out, "output directory")->required();

    CLI::App* spec = app.add_subcommand("spectrum", "interval-lattice and eikonal queries");
    spec->add_option("--query", query, "JSON query file")->required();
    spec->add_option("--out", out, "write the JSON result here instead of stdout");

    CLI::App* ver = app.add_subcommand("verify", "run the internal consistency suite");
    add_q(ver);
    ver->add_option("--cfl", cfl, "Courant number in (0, 1]")->check(CLI::Range(1e-6, 1.0));
    ver->add_option("--delta", delta, "half-width of the excluded midpoint zone");

    int rc = 0;
    fwd->callback([&] { rc = run_forward(qspec, l, n, delta, out); });
    inv->callback([&] { rc = run_inverse(in, out); });
    rt->callback([&] { rc = run_roundtrip(qspec, l, n, delta); });
    sim->callback([&] { rc = run_simulate(qspec, l, n, cfl, T, control, snapshots, dump, out); });
    spec->callback([&] { rc = run_spectrum(query, out); });
    ver->callback([&] { rc = run_verify(qspec, l, n, cfl, delta); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        std::cerr << "ERROR:usage: " << e.what() << "\n";
        return 2;
    } catch (const slwave::parameter_error& e) {
        std::cerr << "ERROR:usage: " << e.what() << "\n";
        return 2;
    } catch (const slwave::io_error& e) {
        std::cerr << "ERROR:data: " << e.what() << "\n";
        return 3;
    } catch (const slwave::numeric_error& e) {
        std::cerr << "ERROR:numeric: " << e.what() << "\n";
        return 3;
    }
    return rc;
}
