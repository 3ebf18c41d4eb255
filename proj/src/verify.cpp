#include "csimplex/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "csimplex/poincare.hpp"

namespace csimplex {

namespace {

void record_point(std::map<std::string, double>& w, const std::string& prefix, const Vec& x) {
    for (size_t i = 0; i < x.size(); ++i)
        w[prefix + std::to_string(i + 1)] = x[i];
}

// deterministic orthonormal basis of e^perp (columns), d x (d-1)
std::vector<Vec> diagonal_complement_basis(int d) {
    std::vector<Vec> basis;
    for (int k = 1; k < d; ++k) {
        // normalized (1,...,1,-k,0,...,0)/sqrt(k(k+1)) with k ones
        Vec v(static_cast<size_t>(d), 0.0);
        const double scale = 1.0 / std::sqrt(static_cast<double>(k) * (k + 1));
        for (int i = 0; i < k; ++i) v[static_cast<size_t>(i)] = scale;
        v[static_cast<size_t>(k)] = -static_cast<double>(k) * scale;
        basis.push_back(std::move(v));
    }
    return basis;
}

Vec chart_coords(const std::vector<Vec>& basis, const Vec& v) {
    Vec c(basis.size());
    for (size_t k = 0; k < basis.size(); ++k) {
        double s = 0.0;
        for (size_t i = 0; i < v.size(); ++i) s += basis[k][i] * v[i];
        c[k] = s;
    }
    return c;
}

}  // namespace

VerificationReport check_unordered_points(const std::vector<Vec>& pts, OrderMode mode,
                                          double tol) {
    VerificationReport rep;
    rep.check = (mode == OrderMode::weak) ? "unordered_weak" : "unordered_strict";
    const size_t n = pts.size();
    const int d = pts.empty() ? 0 : static_cast<int>(pts.front().size());

    rep.passed = true;
    rep.worst_margin = -std::numeric_limits<double>::infinity();
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            if (a == b) continue;
            const Vec& x = pts[a];
            const Vec& y = pts[b];
            // margin > 0 iff x + tol < y strongly (x strictly below y everywhere)
            double strong_margin = std::numeric_limits<double>::infinity();
            for (int i = 0; i < d; ++i)
                strong_margin = std::min(strong_margin,
                                         y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)] - tol);
            if (strong_margin > rep.worst_margin) rep.worst_margin = strong_margin;
            bool violation = strong_margin > 0.0;
            if (!violation && mode == OrderMode::strict) {
                bool leq = true;
                bool some_strict = false;
                for (int i = 0; i < d; ++i) {
                    if (x[static_cast<size_t>(i)] > y[static_cast<size_t>(i)] + tol) leq = false;
                    if (x[static_cast<size_t>(i)] + tol < y[static_cast<size_t>(i)]) some_strict = true;
                }
                violation = leq && some_strict;
            }
            if (violation && rep.passed) {
                rep.passed = false;
                rep.witness = {{"node_a", static_cast<double>(a)}, {"node_b", static_cast<double>(b)}};
                record_point(rep.witness, "x", x);
                record_point(rep.witness, "y", y);
            }
        }
    }
    rep.budget = {{"pairs", static_cast<double>(n * (n - 1))}, {"tol", tol}};
    return rep;
}

VerificationReport check_unordered(const RadialMesh& mesh, OrderMode mode, double tol) {
    return check_unordered_points(mesh.represented_points(), mode, tol);
}

VerificationReport check_retrotone(const SystemSpec& spec, int n_pairs, const Vec& box_lo,
                                   const Vec& box_hi, double tol, std::uint64_t seed) {
    VerificationReport rep;
    rep.check = "retrotone";
    const int d = spec.dim();
    Rng rng(seed);

    int used = 0;
    int attempts = 0;
    const int max_attempts = 200 * n_pairs;
    rep.passed = true;
    rep.worst_margin = std::numeric_limits<double>::infinity();

    while (used < n_pairs && attempts < max_attempts) {
        ++attempts;
        Vec x(static_cast<size_t>(d)), y(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) {
            x[static_cast<size_t>(i)] = rng.uniform(box_lo[static_cast<size_t>(i)], box_hi[static_cast<size_t>(i)]);
            y[static_cast<size_t>(i)] = rng.uniform(box_lo[static_cast<size_t>(i)], box_hi[static_cast<size_t>(i)]);
        }
        const Vec Px = poincare_map(spec, x);
        const Vec Py = poincare_map(spec, y);

        // keep pairs with P(x) < P(y) beyond the tolerance band
        bool leq = true;
        double max_gap = 0.0;
        for (int i = 0; i < d; ++i) {
            const double gap = Py[static_cast<size_t>(i)] - Px[static_cast<size_t>(i)];
            if (gap < 0.0) leq = false;
            max_gap = std::max(max_gap, gap);
        }
        if (!leq || max_gap <= tol) continue;
        ++used;

        for (int i = 0; i < d; ++i) {
            const double back_gap = y[static_cast<size_t>(i)] - x[static_cast<size_t>(i)];
            if (back_gap < rep.worst_margin) rep.worst_margin = back_gap;
            // x <= y within the band; under the band this also carries the
            // componentwise strict conclusion for image-strict components
            const bool bad = back_gap < -tol;
            if (bad && rep.passed) {
                rep.passed = false;
                rep.witness = {{"component", static_cast<double>(i)}};
                record_point(rep.witness, "x", x);
                record_point(rep.witness, "y", y);
                record_point(rep.witness, "Px", Px);
                record_point(rep.witness, "Py", Py);
            }
        }
    }

    if (used < 10) {
        rep.inconclusive = true;
        rep.note = "fewer than 10 image-ordered pairs in the sampling budget";
    }
    rep.budget = {{"pairs_used", static_cast<double>(used)},
                  {"attempts", static_cast<double>(attempts)},
                  {"seed", static_cast<double>(seed)},
                  {"tol", tol}};
    return rep;
}

VerificationReport check_attraction(const SystemSpec& spec, const SectionFamily& family,
                                    int n_starts, int horizon_periods, double tol,
                                    double mono_tol, std::uint64_t seed, double flow_tol) {
    VerificationReport rep;
    rep.check = "attraction";
    const int d = spec.dim();
    const double T = spec.period();
    const int ns = static_cast<int>(family.meshes.size());
    Rng rng(seed);

    rep.passed = true;
    rep.worst_margin = 0.0;  // worst final distance
    double worst_tail = 0.0;

    for (int run = 0; run < n_starts; ++run) {
        Vec x0 = rng.uniform_vec(d, 0.05, 1.5);
        while (norm1(x0) < 0.01) x0 = rng.uniform_vec(d, 0.05, 1.5);

        std::vector<double> times;
        for (int k = 1; k <= horizon_periods * ns; ++k) times.push_back(T * k / ns);
        const auto traj = flow_trajectory(spec, 0.0, times, x0, flow_tol);

        const int tail_start = horizon_periods * ns / 2;
        // monotonicity is checked per torus phase: distances at the same phase
        // compare against the same section mesh, so discretization bias cancels
        std::vector<double> prev(static_cast<size_t>(ns),
                                 std::numeric_limits<double>::infinity());
        for (int k = tail_start; k < static_cast<int>(times.size()); ++k) {
            const int sec_idx = (k + 1) % ns;  // times[k] = T (k+1)/ns
            const double dist = point_to_mesh_distance(traj[static_cast<size_t>(k)].x,
                                                       family.meshes[static_cast<size_t>(sec_idx)]);
            if (dist > tol && rep.passed) {
                rep.passed = false;
                rep.witness = {{"t", times[static_cast<size_t>(k)]}, {"distance", dist}};
                record_point(rep.witness, "x0_", x0);
            }
            double& phase_prev = prev[static_cast<size_t>(sec_idx)];
            if (std::isfinite(phase_prev) && dist > phase_prev + mono_tol) {
                worst_tail = std::max(worst_tail, dist - phase_prev);
                if (rep.passed) {
                    rep.passed = false;
                    rep.note = "tail distance increased at fixed phase";
                    rep.witness = {{"t", times[static_cast<size_t>(k)]},
                                   {"distance", dist},
                                   {"previous", phase_prev}};
                    record_point(rep.witness, "x0_", x0);
                }
            }
            phase_prev = dist;
            if (k + 1 == static_cast<int>(times.size()))
                rep.worst_margin = std::max(rep.worst_margin, dist);
        }
    }
    rep.budget = {{"starts", static_cast<double>(n_starts)},
                  {"horizon_periods", static_cast<double>(horizon_periods)},
                  {"tol", tol},
                  {"mono_tol", mono_tol},
                  {"seed", static_cast<double>(seed)},
                  {"worst_tail_increase", worst_tail}};
    return rep;
}

VerificationReport check_origin_repeller(const SystemSpec& spec, const SectionFamily& family,
                                         int n_starts, double tol, std::uint64_t seed,
                                         double flow_tol) {
    VerificationReport rep;
    rep.check = "origin_repeller";
    const double T = spec.period();
    const RadialMesh& sigma0 = family.meshes.front();
    Rng rng(seed);

    rep.passed = true;
    rep.worst_margin = std::numeric_limits<double>::infinity();
    const int backward_periods = 5;

    for (int run = 0; run < n_starts; ++run) {
        // interior start: a contraction of a represented point
        const int node = rng.uniform_int(static_cast<int>(sigma0.R.size()));
        const double alpha = rng.uniform(0.3, 0.7);
        Vec x = sigma0.point(node);
        for (auto& v : x) v *= alpha;
        if (gamma_membership(sigma0, x, 1e-9).region == Region::outside) continue;

        // backward: norms decrease toward the origin
        double prev = norm2(x);
        Vec cur = x;
        bool ok = true;
        for (int k = 1; k <= backward_periods; ++k) {
            try {
                cur = flow(spec, 0.0, -T, cur, flow_tol).x;
            } catch (const BlowUpError&) {
                ok = false;  // interior points must not blow up backward
                break;
            }
            const double now = norm2(cur);
            rep.worst_margin = std::min(rep.worst_margin, prev - now);
            if (now > prev + tol) ok = false;
            prev = now;
        }
        // forward: the orbit moves away from the origin
        const Vec fwd = poincare_map(spec, x, flow_tol);
        if (norm2(fwd) + tol < norm2(x)) ok = false;
        if (!ok && rep.passed) {
            rep.passed = false;
            rep.witness = {{"alpha", alpha}, {"node", static_cast<double>(node)}};
            record_point(rep.witness, "x", x);
        }
    }
    rep.budget = {{"starts", static_cast<double>(n_starts)},
                  {"backward_periods", static_cast<double>(backward_periods)},
                  {"tol", tol},
                  {"seed", static_cast<double>(seed)}};
    return rep;
}

VerificationReport check_asymptotic_phase(const SystemSpec& spec, const Vec& x,
                                          const RadialMesh& sigma0, int horizon_periods,
                                          double tol, double flow_tol) {
    VerificationReport rep;
    rep.check = "asymptotic_phase";
    const double T = spec.period();
    if (norm1(x) == 0.0) throw InputError("asymptotic phase requires x != 0");

    // partner y: mesh point minimizing the terminal iterate distance
    const Vec xn = poincare_iter(spec, x, horizon_periods, flow_tol);
    double best = std::numeric_limits<double>::infinity();
    int best_node = -1;
    for (size_t j = 0; j < sigma0.R.size(); ++j) {
        const Vec yn = poincare_iter(spec, sigma0.point(static_cast<int>(j)), horizon_periods, flow_tol);
        const double dist = std::sqrt(dist2(xn, yn));
        if (dist < best) {
            best = dist;
            best_node = static_cast<int>(j);
        }
    }
    if (best > tol) {
        rep.inconclusive = true;
        rep.note = "no mesh partner achieves the tolerance; a finer mesh may be needed";
        rep.worst_margin = best;
        rep.budget = {{"horizon_periods", static_cast<double>(horizon_periods)}, {"tol", tol}};
        return rep;
    }

    const Vec y = sigma0.point(best_node);
    // continuous-time decay over the horizon, non-increasing over the last half
    std::vector<double> times;
    const int per = 8;
    for (int k = 1; k <= horizon_periods * per; ++k) times.push_back(T * k / per);
    const auto tx = flow_trajectory(spec, 0.0, times, x, flow_tol);
    const auto ty = flow_trajectory(spec, 0.0, times, y, flow_tol);

    rep.passed = true;
    double prev = std::numeric_limits<double>::infinity();
    for (size_t k = 0; k < times.size(); ++k) {
        const double dist = std::sqrt(dist2(tx[k].x, ty[k].x));
        if (k + 1 == times.size()) {
            rep.worst_margin = dist;
            if (dist > tol) rep.passed = false;
        }
        if (k >= times.size() / 2) {
            if (dist > prev + tol) rep.passed = false;
            prev = dist;
        }
    }
    if (!rep.passed) {
        rep.witness = {{"partner_node", static_cast<double>(best_node)}};
        record_point(rep.witness, "x", x);
        record_point(rep.witness, "y", y);
    }
    rep.note = rep.note.empty() ? "best-effort partner (terminal-distance minimizer)" : rep.note;
    rep.budget = {{"horizon_periods", static_cast<double>(horizon_periods)},
                  {"tol", tol},
                  {"mesh_nodes", static_cast<double>(sigma0.R.size())},
                  {"partner_node", static_cast<double>(best_node)},
                  {"terminal_iterate_distance", best}};
    return rep;
}

VerificationReport check_lipschitz_projection(const RadialMesh& mesh, double tol) {
    VerificationReport rep;
    rep.check = "lipschitz_projection";
    const int d = mesh.grid->d;
    const double bound = std::sqrt(1.0 + d);
    const std::vector<Vec> pts = mesh.represented_points();

    rep.passed = true;
    rep.worst_margin = 0.0;  // max observed ratio
    for (size_t a = 0; a < pts.size(); ++a) {
        const Vec pa = project_along_diagonal(pts[a]);
        for (size_t b = a + 1; b < pts.size(); ++b) {
            const Vec pb = project_along_diagonal(pts[b]);
            const double num = std::sqrt(dist2(pts[a], pts[b]));
            const double den = std::sqrt(dist2(pa, pb));
            if (num > bound * den + tol) {
                if (rep.passed) {
                    rep.passed = false;
                    rep.witness = {{"node_a", static_cast<double>(a)},
                                   {"node_b", static_cast<double>(b)}};
                }
            }
            if (den > 0.0) rep.worst_margin = std::max(rep.worst_margin, num / den);
        }
    }
    rep.budget = {{"bound", bound}, {"tol", tol},
                  {"pairs", static_cast<double>(pts.size() * (pts.size() - 1) / 2)}};
    return rep;
}

VerificationReport check_conjugacy(const SystemSpec& spec, const SectionFamily& family,
                                   int n_samples, double t_step, double tol,
                                   std::uint64_t seed, double flow_tol) {
    VerificationReport rep;
    rep.check = "conjugacy";
    const int d = spec.dim();
    const std::vector<Vec> basis = diagonal_complement_basis(d);
    Rng rng(seed);

    rep.passed = true;
    rep.worst_margin = 0.0;
    double worst_reconstruction = 0.0;

    for (size_t sec = 0; sec < family.meshes.size(); ++sec) {
        const RadialMesh& mesh = family.meshes[sec];
        const double s = family.s_grid[sec];
        const std::vector<Vec> pts = mesh.represented_points();

        // projected mesh in V-chart coordinates
        std::vector<Vec> proj_chart(pts.size());
        for (size_t j = 0; j < pts.size(); ++j)
            proj_chart[j] = chart_coords(basis, project_along_diagonal(pts[j]));

        // injectivity of the projection at mesh scale
        for (size_t a2 = 0; a2 < pts.size(); ++a2)
            for (size_t b2 = a2 + 1; b2 < pts.size(); ++b2) {
                double pd = 0.0;
                for (size_t c = 0; c < proj_chart[a2].size(); ++c)
                    pd = std::max(pd, std::abs(proj_chart[a2][c] - proj_chart[b2][c]));
                if (pd < tol && std::sqrt(dist2(pts[a2], pts[b2])) > 100.0 * tol) {
                    rep.passed = false;
                    rep.note = "projection folds: two nodes project together with far preimages";
                    rep.witness = {{"section", s},
                                   {"node_a", static_cast<double>(a2)},
                                   {"node_b", static_cast<double>(b2)}};
                }
            }

        for (int q = 0; q < n_samples; ++q) {
            // sample x on the represented surface: node or random interior point
            Vec x;
            if (q % 2 == 0) {
                x = pts[static_cast<size_t>(rng.uniform_int(static_cast<int>(pts.size())))];
            } else {
                const auto& sx = mesh.grid->simplices[static_cast<size_t>(
                    rng.uniform_int(static_cast<int>(mesh.grid->simplices.size())))];
                Vec w(sx.size());
                double tot = 0.0;
                for (auto& wv : w) {
                    wv = rng.uniform(0.1, 1.0);
                    tot += wv;
                }
                x.assign(static_cast<size_t>(d), 0.0);
                for (size_t v = 0; v < sx.size(); ++v) {
                    const Vec pv = mesh.point(sx[v]);
                    for (int c = 0; c < d; ++c)
                        x[static_cast<size_t>(c)] += (w[v] / tot) * pv[static_cast<size_t>(c)];
                }
            }

            // (a)/(b): project and reconstruct by interpolation over the projected mesh
            const Vec v = chart_coords(basis, project_along_diagonal(x));
            Located loc;
            try {
                loc = locate_in_mesh(proj_chart, mesh.grid->simplices, v);
            } catch (const MeshFoldError&) {
                rep.passed = false;
                rep.note = "projected mesh does not cover a projected sample";
                rep.witness = {{"section", s}};
                record_point(rep.witness, "x", x);
                continue;
            }
            Vec xr(static_cast<size_t>(d), 0.0);
            for (size_t vv = 0; vv < loc.vertices.size(); ++vv) {
                const Vec pv = mesh.point(loc.vertices[vv]);
                for (int c = 0; c < d; ++c)
                    xr[static_cast<size_t>(c)] += loc.lambda[vv] * pv[static_cast<size_t>(c)];
            }
            const double rec_err = std::sqrt(dist2(xr, x));
            worst_reconstruction = std::max(worst_reconstruction, rec_err);
            if (rec_err > tol) {
                rep.passed = false;
                if (rep.witness.empty()) {
                    rep.note = "reconstruction through the projection exceeded tolerance";
                    rep.witness = {{"section", s}, {"error", rec_err}};
                    record_point(rep.witness, "x", x);
                }
            }

            // (c): the square commutes under the flow by t_step
            const Vec fx = flow(spec, s, s + t_step, x, flow_tol).x;
            const Vec fxr = flow(spec, s, s + t_step, xr, flow_tol).x;
            const Vec wa = project_along_diagonal(fx);
            const Vec wb = project_along_diagonal(fxr);
            const double comm_err = std::sqrt(dist2(wa, wb));
            rep.worst_margin = std::max(rep.worst_margin, std::max(comm_err, rec_err));
            if (comm_err > tol) {
                rep.passed = false;
                if (rep.witness.empty()) {
                    rep.note = "projected flow square failed to commute";
                    rep.witness = {{"section", s}, {"error", comm_err}};
                    record_point(rep.witness, "x", x);
                }
            }
        }
    }

    rep.budget = {{"sections", static_cast<double>(family.meshes.size())},
                  {"samples_per_section", static_cast<double>(n_samples)},
                  {"t_step", t_step},
                  {"tol", tol},
                  {"seed", static_cast<double>(seed)},
                  {"worst_reconstruction", worst_reconstruction}};
    return rep;
}

}  // namespace csimplex
