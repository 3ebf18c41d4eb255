#include "csimplex/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"

namespace csimplex {

using nlohmann::json;

std::string config_hash(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

std::string format_full(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw InputError("cannot open output file: " + path);
    return out;
}

void meta_line(std::ofstream& out, const Meta& meta, const std::string& extra = "") {
    out << "# csimplex " << kVersion << " config=" << meta.config_hash
        << " seed=" << meta.seed;
    if (!meta.hypotheses_verified) out << " hypotheses-unverified";
    if (!extra.empty()) out << ' ' << extra;
    out << '\n';
}

json meta_json(const Meta& meta) {
    json j;
    j["version"] = kVersion;
    j["config_hash"] = meta.config_hash;
    j["seed"] = meta.seed;
    if (!meta.hypotheses_verified) j["hypotheses_verified"] = false;
    return j;
}

}  // namespace

void write_trajectory_csv(const std::string& path, const std::vector<double>& times,
                          const std::vector<FlowResult>& traj, const Meta& meta) {
    auto out = open_out(path);
    meta_line(out, meta);
    const int d = traj.empty() ? 0 : static_cast<int>(traj.front().x.size());
    out << "t";
    for (int i = 1; i <= d; ++i) out << ",x" << i;
    out << '\n';
    for (size_t k = 0; k < traj.size(); ++k) {
        out << format_full(times[k]);
        for (double v : traj[k].x) out << ',' << format_full(v);
        out << '\n';
    }
}

void write_mesh_csv(const std::string& path, const RadialMesh& mesh, const Meta& meta) {
    auto out = open_out(path);
    meta_line(out, meta, "m=" + std::to_string(mesh.grid->m) + " d=" + std::to_string(mesh.grid->d));
    const int d = mesh.grid->d;
    out << "s";
    for (int i = 1; i <= d; ++i) out << ",u" << i;
    out << ",R";
    for (int i = 1; i <= d; ++i) out << ",x" << i;
    out << '\n';
    for (size_t n = 0; n < mesh.R.size(); ++n) {
        out << format_full(mesh.s.s);
        for (double u : mesh.grid->nodes[n]) out << ',' << format_full(u);
        out << ',' << format_full(mesh.R[n]);
        const Vec p = mesh.point(static_cast<int>(n));
        for (double v : p) out << ',' << format_full(v);
        out << '\n';
    }
}

void write_gap_history_csv(const std::string& path, const std::vector<GapRecord>& hist,
                           const Meta& meta) {
    auto out = open_out(path);
    meta_line(out, meta);
    out << "iter,gap,delta_lower,delta_upper\n";
    for (const auto& r : hist)
        out << r.iter << ',' << format_full(r.gap) << ',' << format_full(r.delta_lower)
            << ',' << format_full(r.delta_upper) << '\n';
}

void write_iterates_csv(const std::string& path, const std::vector<Vec>& iterates,
                        const Meta& meta) {
    auto out = open_out(path);
    meta_line(out, meta);
    const int d = iterates.empty() ? 0 : static_cast<int>(iterates.front().size());
    out << "n";
    for (int i = 1; i <= d; ++i) out << ",x" << i;
    out << '\n';
    for (size_t k = 0; k < iterates.size(); ++k) {
        out << k;
        for (double v : iterates[k]) out << ',' << format_full(v);
        out << '\n';
    }
}

RadialMesh read_mesh_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open mesh file: " + path);
    std::string line;
    int m = -1, d = -1;
    std::vector<double> svals, Rvals;
    std::vector<Vec> nodes;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto mp = line.find(" m=");
            const auto dp = line.find(" d=");
            if (mp != std::string::npos) m = std::stoi(line.substr(mp + 3));
            if (dp != std::string::npos) d = std::stoi(line.substr(dp + 3));
            continue;
        }
        if (line.rfind("s,", 0) == 0) continue;  // header
        std::stringstream ss(line);
        std::string cell;
        std::vector<double> row;
        while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
        if (d < 0) d = static_cast<int>((row.size() - 2) / 2);
        if (static_cast<int>(row.size()) != 2 * d + 2)
            throw InputError("mesh row width mismatch in " + path);
        svals.push_back(row[0]);
        nodes.emplace_back(row.begin() + 1, row.begin() + 1 + d);
        Rvals.push_back(row[static_cast<size_t>(d) + 1]);
    }
    if (Rvals.empty()) throw InputError("empty mesh file: " + path);
    if (m < 0) throw InputError("mesh file lacks the m= metadata: " + path);

    RadialMesh mesh;
    mesh.grid = direction_grid(d, m);
    if (mesh.grid->nodes.size() != Rvals.size())
        throw InputError("mesh node count does not match its resolution");
    mesh.R.assign(Rvals.size(), 0.0);
    for (size_t r = 0; r < Rvals.size(); ++r) {
        std::vector<int> k(static_cast<size_t>(d));
        for (int c = 0; c < d; ++c)
            k[static_cast<size_t>(c)] = static_cast<int>(std::lround(nodes[r][static_cast<size_t>(c)] * m));
        const int idx = mesh.grid->node_index(k);
        if (idx < 0) throw InputError("mesh row is not a lattice node");
        mesh.R[static_cast<size_t>(idx)] = Rvals[r];
    }
    mesh.s = TorusPoint{svals.front()};
    mesh.kind = MeshKind::converged;
    return mesh;
}

namespace {

json report_to_json(const HypothesisReport& r) {
    json j;
    j["hypothesis"] = r.hypothesis;
    j["passed"] = r.passed;
    j["values"] = r.values;
    j["witness"] = r.witness;
    j["budget"] = r.budget;
    return j;
}

json report_to_json(const VerificationReport& r) {
    json j;
    j["check"] = r.check;
    j["passed"] = r.passed;
    if (r.inconclusive) j["inconclusive"] = true;
    j["worst_margin"] = r.worst_margin;
    j["witness"] = r.witness;
    j["budget"] = r.budget;
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

}  // namespace

std::string hypothesis_reports_json(const std::vector<HypothesisReport>& reports,
                                    const Meta& meta) {
    json j;
    j["meta"] = meta_json(meta);
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
    return j.dump(2);
}

std::string axis_profiles_json(const std::vector<AxisProfile>& profiles, const Meta& meta) {
    json j;
    j["meta"] = meta_json(meta);
    json arr = json::array();
    for (const auto& p : profiles) {
        json e;
        e["i"] = p.i;
        e["xhat"] = p.xhat;
        e["residual"] = p.residual;
        e["iterations"] = p.iterations;
        json samples = json::array();
        for (const auto& [t, v] : p.psi) samples.push_back({t, v});
        e["psi_samples"] = samples;
        arr.push_back(e);
    }
    j["profiles"] = arr;
    return j.dump(2);
}

std::string verification_reports_json(const std::vector<VerificationReport>& reports,
                                      const Meta& meta) {
    json j;
    j["meta"] = meta_json(meta);
    j["reports"] = json::array();
    for (const auto& r : reports) j["reports"].push_back(report_to_json(r));
    return j.dump(2);
}

std::string sigma_summary_json(const SigmaResult& res, double runtime_seconds,
                               const Meta& meta) {
    json j;
    j["meta"] = meta_json(meta);
    j["converged"] = res.converged;
    j["iterations"] = res.iterations;
    j["final_gap"] = res.final_gap;
    j["epsilon_used"] = res.epsilon_used;
    j["runtime_seconds"] = runtime_seconds;
    return j.dump(2);
}

std::string family_index_json(const SectionFamily& family, double T, double tol,
                              double gap, const Meta& meta) {
    json j;
    j["meta"] = meta_json(meta);
    j["T"] = T;
    j["n_sections"] = family.meshes.size();
    j["tol"] = tol;
    j["gap"] = gap;
    j["s_grid"] = family.s_grid;
    j["continuity_modulus"] = family.continuity_modulus;
    j["wraparound_error"] = family.wraparound_error;
    return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& text) {
    auto out = open_out(path);
    out << text;
    if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace csimplex
