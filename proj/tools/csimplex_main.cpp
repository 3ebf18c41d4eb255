// Command-line pipeline: spec -> hypothesis checks -> axis profiles ->
// normalization -> carrying-simplex construction -> sections -> verification
// -> export.  Exit codes: 0 pass, 1 fail/non-converged, 2 inconclusive,
// 3 unreadable spec/config.

#include <chrono>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "json.hpp"

#include "csimplex/io.hpp"

namespace fs = std::filesystem;
using namespace csimplex;

namespace {

struct Options {
    std::string spec_path;
    std::string out_dir;
    double tol = 1e-6;          // mesh / verification tolerance
    double flow_tol = 1e-10;    // integrator tolerance
    int mesh_res = 32;
    double epsilon = 0.1;
    double kappa = 0.1;
    int n_sections = 16;
    int horizon = 20;
    std::uint64_t seed = 1;
    int threads = 0;            // 0: use the hardware concurrency
    bool force = false;
};

void add_common(CLI::App* cmd, Options& o, bool needs_spec = true) {
    auto* s = cmd->add_option("--spec", o.spec_path, "system spec JSON file");
    if (needs_spec) s->required();
    cmd->add_option("--out", o.out_dir, "output directory");
    cmd->add_option("--tol", o.tol, "mesh/verification tolerance");
    cmd->add_option("--flow-tol", o.flow_tol, "integrator tolerance");
    cmd->add_option("--mesh-res", o.mesh_res, "direction grid resolution m");
    cmd->add_option("--epsilon", o.epsilon, "lower seed radius");
    cmd->add_option("--kappa", o.kappa, "box margin for the upper seed");
    cmd->add_option("--sections", o.n_sections, "number of torus sections");
    cmd->add_option("--horizon", o.horizon, "attraction horizon in periods");
    cmd->add_option("--seed", o.seed, "random seed (recorded in outputs)");
    cmd->add_option("--threads", o.threads, "worker threads (0 = hardware)");
    cmd->add_flag("--force", o.force, "run even if hypothesis checks fail");
}

int threads_of(const Options& o) {
    if (o.threads > 0) return o.threads;
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? static_cast<int>(hc) : 1;
}

Meta make_meta(const Options& o, const std::string& spec_text, const std::string& command) {
    std::ostringstream canon;
    canon << command << "|tol=" << o.tol << "|flow_tol=" << o.flow_tol << "|m=" << o.mesh_res
          << "|eps=" << o.epsilon << "|kappa=" << o.kappa << "|sections=" << o.n_sections
          << "|horizon=" << o.horizon << "|seed=" << o.seed << "|spec=" << spec_text;
    Meta meta;
    meta.config_hash = config_hash(canon.str());
    meta.seed = o.seed;
    return meta;
}

SystemSpec load_spec_or_exit(const Options& o, std::string* text_out = nullptr) {
    try {
        const std::string text = read_text_file(o.spec_path);
        SystemSpec spec = load_system_json(text);
        if (text_out) *text_out = text;
        return spec;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        std::exit(3);
    }
}

void ensure_out(const Options& o) {
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
}

std::string out_path(const Options& o, const std::string& name) {
    return (fs::path(o.out_dir) / name).string();
}

std::vector<HypothesisReport> run_hypotheses(const SystemSpec& spec, const Options& o) {
    std::vector<HypothesisReport> reports;
    reports.push_back(check_H2(spec));
    reports.push_back(find_H3tilde_M(spec));
    reports.push_back(check_H4(spec, 2000, H4Mode::weak, o.seed));
    reports.push_back(check_H4(spec, 2000, H4Mode::strict, o.seed + 1));
    return reports;
}

bool mandatory_pass(const std::vector<HypothesisReport>& reports) {
    for (const auto& r : reports)
        if (r.hypothesis != "H4strict" && !r.passed) return false;
    return true;
}

Vec parse_point(const std::string& csv, int d) {
    Vec x;
    std::stringstream ss(csv);
    std::string cell;
    while (std::getline(ss, cell, ',')) x.push_back(std::stod(cell));
    if (static_cast<int>(x.size()) != d)
        throw InputError("--x0 must have " + std::to_string(d) + " components");
    return x;
}

int cmd_check(const Options& o) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    const Meta meta = make_meta(o, text, "check");
    const auto reports = run_hypotheses(spec, o);
    const std::string json_text = hypothesis_reports_json(reports, meta);
    std::cout << json_text << "\n";
    if (!o.out_dir.empty()) {
        ensure_out(o);
        write_text_file(out_path(o, "hypotheses.json"), json_text);
    }
    return mandatory_pass(reports) ? 0 : 1;
}

int cmd_axes(const Options& o) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    const Meta meta = make_meta(o, text, "axes");
    AxisSolveOptions aso;
    aso.flow_tol = o.flow_tol;
    const auto profiles = compute_all_axis_profiles(spec, aso);
    const std::string json_text = axis_profiles_json(profiles, meta);
    std::cout << json_text << "\n";
    if (!o.out_dir.empty()) {
        ensure_out(o);
        write_text_file(out_path(o, "axes.json"), json_text);
    }
    return 0;
}

int cmd_simulate(const Options& o, double t0, double t1, const std::string& x0_csv,
                 int samples) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    const Meta meta = make_meta(o, text, "simulate");
    const Vec x0 = parse_point(x0_csv, spec.dim());
    std::vector<double> times;
    for (int k = 0; k <= samples; ++k) times.push_back(t0 + (t1 - t0) * k / samples);
    const auto traj = flow_trajectory(spec, t0, times, x0, o.flow_tol);
    if (!o.out_dir.empty()) {
        ensure_out(o);
        write_trajectory_csv(out_path(o, "trajectory.csv"), times, traj, meta);
    } else {
        std::cout << "t";
        for (int i = 1; i <= spec.dim(); ++i) std::cout << ",x" << i;
        std::cout << "\n";
        for (size_t k = 0; k < traj.size(); ++k) {
            std::cout << format_full(times[k]);
            for (double v : traj[k].x) std::cout << ',' << format_full(v);
            std::cout << "\n";
        }
    }
    return 0;
}

int cmd_poincare(const Options& o, const std::string& x0_csv, int iters) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    const Meta meta = make_meta(o, text, "poincare");
    Vec x = parse_point(x0_csv, spec.dim());
    std::vector<Vec> iterates{x};
    for (int n = 0; n < iters; ++n) {
        x = poincare_map(spec, x, o.flow_tol);
        iterates.push_back(x);
    }
    if (!o.out_dir.empty()) {
        ensure_out(o);
        write_iterates_csv(out_path(o, "poincare.csv"), iterates, meta);
    } else {
        std::cout << "n";
        for (int i = 1; i <= spec.dim(); ++i) std::cout << ",x" << i;
        std::cout << "\n";
        for (size_t k = 0; k < iterates.size(); ++k) {
            std::cout << k;
            for (double v : iterates[k]) std::cout << ',' << format_full(v);
            std::cout << "\n";
        }
    }
    return 0;
}

struct Pipeline {
    SystemSpec normalized;
    std::vector<AxisProfile> profiles;
    SigmaResult sigma;
    Meta meta;
};

// hypotheses -> axes -> normalization -> Sigma_0
Pipeline run_pipeline(const SystemSpec& spec, const Options& o, const std::string& text,
                      const std::string& command, bool* gate_ok) {
    const auto reports = run_hypotheses(spec, o);
    const bool ok = mandatory_pass(reports);
    if (gate_ok) *gate_ok = ok;
    if (!ok && !o.force)
        throw HypothesisFailure("mandatory", "hypothesis checks failed (use --force to override)");

    AxisSolveOptions aso;
    aso.flow_tol = o.flow_tol;
    auto [normalized, profiles] = normalized_system(spec, aso);

    SigmaOptions so;
    so.epsilon = o.epsilon;
    so.kappa = o.kappa;
    so.tol = o.tol;
    so.flow_tol = o.flow_tol;
    so.threads = threads_of(o);
    SigmaResult sigma = construct_sigma(normalized, direction_grid(spec.dim(), o.mesh_res), so);

    Pipeline p{std::move(normalized), std::move(profiles), std::move(sigma), Meta{}};
    p.meta = make_meta(o, text, command);
    p.meta.hypotheses_verified = ok;
    return p;
}

int cmd_simplex(const Options& o) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    bool gate_ok = true;
    const auto start = std::chrono::steady_clock::now();
    Pipeline p = run_pipeline(spec, o, text, "simplex", &gate_ok);
    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    ensure_out(o);
    write_mesh_csv(out_path(o, "sigma0.csv"), p.sigma.sigma0, p.meta);
    write_gap_history_csv(out_path(o, "gap_history.csv"), p.sigma.history, p.meta);
    write_text_file(out_path(o, "summary.json"), sigma_summary_json(p.sigma, runtime, p.meta));
    write_text_file(out_path(o, "axes.json"), axis_profiles_json(p.profiles, p.meta));
    if (p.sigma.converged) {
        const SectionFamily fam = section_family(p.normalized, p.sigma.sigma0, o.n_sections,
                                                 o.flow_tol, threads_of(o));
        for (size_t k = 0; k < fam.meshes.size(); ++k)
            write_mesh_csv(out_path(o, "section_" + std::to_string(k) + ".csv"), fam.meshes[k],
                           p.meta);
        write_text_file(out_path(o, "family.json"),
                        family_index_json(fam, p.normalized.period(), o.tol,
                                          p.sigma.final_gap, p.meta));
    }
    std::cout << (p.sigma.converged ? "converged" : "NOT converged") << " after "
              << p.sigma.iterations << " iterations, final gap " << p.sigma.final_gap << "\n";
    return p.sigma.converged ? 0 : 1;
}

int cmd_sections(const Options& o) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    bool gate_ok = true;
    Pipeline p = run_pipeline(spec, o, text, "sections", &gate_ok);
    if (!p.sigma.converged) {
        std::cerr << "error: Sigma_0 did not converge; cannot build sections\n";
        return 1;
    }
    const SectionFamily fam = section_family(p.normalized, p.sigma.sigma0, o.n_sections,
                                             o.flow_tol, threads_of(o));
    ensure_out(o);
    write_mesh_csv(out_path(o, "sigma0.csv"), p.sigma.sigma0, p.meta);
    for (size_t k = 0; k < fam.meshes.size(); ++k)
        write_mesh_csv(out_path(o, "section_" + std::to_string(k) + ".csv"), fam.meshes[k],
                       p.meta);
    write_text_file(out_path(o, "family.json"),
                    family_index_json(fam, p.normalized.period(), o.tol, p.sigma.final_gap,
                                      p.meta));
    std::cout << "wrote " << fam.meshes.size() << " sections; wrap-around error "
              << fam.wraparound_error << "\n";
    return 0;
}

int cmd_verify(const Options& o) {
    std::string text;
    const SystemSpec spec = load_spec_or_exit(o, &text);
    bool gate_ok = true;
    Pipeline p = run_pipeline(spec, o, text, "verify", &gate_ok);
    if (!p.sigma.converged) {
        std::cerr << "error: Sigma_0 did not converge; cannot verify\n";
        return 1;
    }
    const SectionFamily fam = section_family(p.normalized, p.sigma.sigma0, o.n_sections,
                                             o.flow_tol, threads_of(o));
    const double T = p.normalized.period();
    const int d = p.normalized.dim();
    // order comparisons and distances on computed meshes are meaningful only
    // down to the mesh accuracy: bracket gap plus the O(h^2) resample bias
    const double mm = static_cast<double>(o.mesh_res) * o.mesh_res;
    const double mesh_tol = std::max({o.tol, 10.0 * p.sigma.final_gap, 4.0 / mm});

    std::vector<VerificationReport> reports;
    reports.push_back(check_unordered(p.sigma.sigma0, OrderMode::weak, mesh_tol));
    const auto h4s = check_H4(p.normalized, 2000, H4Mode::strict, o.seed + 1);
    if (h4s.passed)
        reports.push_back(check_unordered(p.sigma.sigma0, OrderMode::strict, mesh_tol));
    reports.push_back(check_retrotone(spec, 1000, Vec(static_cast<size_t>(d), 0.0),
                                      Vec(static_cast<size_t>(d), 1.1), 1e-9, o.seed));
    const double mono_tol = std::max(1e-6, 0.4 / mm);
    reports.push_back(check_attraction(p.normalized, fam, 25, o.horizon, mesh_tol, mono_tol,
                                       o.seed, o.flow_tol));
    reports.push_back(check_origin_repeller(p.normalized, fam, 10, 1e-9, o.seed, o.flow_tol));
    {
        Rng rng(o.seed + 2);
        const Vec x = rng.uniform_vec(d, 0.2, 1.2);
        reports.push_back(
            check_asymptotic_phase(p.normalized, x, p.sigma.sigma0, o.horizon, 1e-3, o.flow_tol));
    }
    reports.push_back(check_lipschitz_projection(p.sigma.sigma0));
    reports.push_back(check_conjugacy(p.normalized, fam, 8, T / o.n_sections,
                                      10.0 * mesh_tol, o.seed, o.flow_tol));

    const std::string json_text = verification_reports_json(reports, p.meta);
    std::cout << json_text << "\n";
    if (!o.out_dir.empty()) {
        ensure_out(o);
        write_text_file(out_path(o, "verification.json"), json_text);
    }
    bool any_fail = false, any_inconclusive = false;
    for (const auto& r : reports) {
        if (r.inconclusive) any_inconclusive = true;
        else if (!r.passed) any_fail = true;
    }
    if (any_fail) return 1;
    if (any_inconclusive) return 2;
    return 0;
}

int cmd_export(const Options& o) {
    // bundle the numeric outputs of a previous run into one JSON document
    try {
        nlohmann::json bundle;
        bundle["version"] = kVersion;
        const fs::path dir(o.out_dir);
        if (!fs::exists(dir)) throw InputError("output directory not found: " + o.out_dir);
        for (const auto& name : {"summary.json", "family.json", "axes.json",
                                 "hypotheses.json", "verification.json"}) {
            const fs::path f = dir / name;
            if (fs::exists(f)) bundle[name] = nlohmann::json::parse(read_text_file(f.string()));
        }
        nlohmann::json meshes = nlohmann::json::array();
        for (const auto& entry : fs::directory_iterator(dir)) {
            const std::string name = entry.path().filename().string();
            if (name.rfind("section_", 0) != 0 && name != "sigma0.csv") continue;
            const RadialMesh mesh = read_mesh_csv(entry.path().string());
            nlohmann::json jm;
            jm["file"] = name;
            jm["s"] = mesh.s.s;
            jm["m"] = mesh.grid->m;
            nlohmann::json pts = nlohmann::json::array();
            for (const auto& pt : mesh.represented_points()) pts.push_back(pt);
            jm["points"] = pts;
            meshes.push_back(jm);
        }
        bundle["meshes"] = meshes;
        const std::string out = (dir / "bundle.json").string();
        write_text_file(out, bundle.dump(2));
        std::cout << "wrote " << out << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"time-periodic carrying simplex toolkit"};
    app.require_subcommand(1);

    Options o;
    double t0 = 0.0, t1 = 1.0;
    std::string x0_csv = "0.5,0.5";
    int samples = 100, iters = 10;

    auto* c_check = app.add_subcommand("check", "run the growth-rate hypothesis checks");
    add_common(c_check, o);
    auto* c_axes = app.add_subcommand("axes", "axis fixed points and periodic orbits");
    add_common(c_axes, o);
    auto* c_sim = app.add_subcommand("simulate", "integrate a trajectory to CSV");
    add_common(c_sim, o);
    c_sim->add_option("--t0", t0, "start time");
    c_sim->add_option("--t1", t1, "end time")->required();
    c_sim->add_option("--x0", x0_csv, "initial point, comma separated")->required();
    c_sim->add_option("--samples", samples, "number of output rows - 1");
    auto* c_poin = app.add_subcommand("poincare", "iterate the period map");
    add_common(c_poin, o);
    c_poin->add_option("--x0", x0_csv, "initial point, comma separated")->required();
    c_poin->add_option("--iters", iters, "number of iterations");
    auto* c_simplex = app.add_subcommand("simplex", "construct Sigma_0 with bracket meshes");
    add_common(c_simplex, o);
    auto* c_sections = app.add_subcommand("sections", "build the torus section family");
    add_common(c_sections, o);
    auto* c_verify = app.add_subcommand("verify", "run the property-verification suite");
    add_common(c_verify, o);
    auto* c_export = app.add_subcommand("export", "bundle a run directory into one JSON");
    add_common(c_export, o, /*needs_spec=*/false);

    CLI11_PARSE(app, argc, argv);

    try {
        if (c_check->parsed()) return cmd_check(o);
        if (c_axes->parsed()) return cmd_axes(o);
        if (c_sim->parsed()) return cmd_simulate(o, t0, t1, x0_csv, samples);
        if (c_poin->parsed()) return cmd_poincare(o, x0_csv, iters);
        if (c_simplex->parsed()) return cmd_simplex(o);
        if (c_sections->parsed()) return cmd_sections(o);
        if (c_verify->parsed()) return cmd_verify(o);
        if (c_export->parsed()) return cmd_export(o);
    } catch (const HypothesisFailure& e) {
        std::cerr << "hypothesis gate: " << e.what() << "\n";
        return 1;
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
