// Acceptance suite: runs every acceptance criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion.  Exit code = number of
// failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "csimplex/hypotheses.hpp"
#include "csimplex/io.hpp"
#include "csimplex/poincare.hpp"
#include "csimplex/simplex.hpp"
#include "csimplex/verify.hpp"
#include "oracles.hpp"

using namespace csimplex;

namespace {

int failures = 0;

void report(int criterion, bool ok, const std::string& what) {
    std::printf("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL", criterion, what.c_str());
    std::fflush(stdout);
    if (!ok) ++failures;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3e", v);
    return buf;
}

SystemSpec logistic2() { return make_decoupled_logistic(2); }

SystemSpec symlv() { return make_lv_constant(1.0, {1.0, 1.0}, {{1.0, 0.5}, {0.5, 1.0}}); }

SystemSpec seasonal() {
    return make_lv_seasonal(1.0, {1.0, 1.0}, 0.5, {3.0, 3.0}, {{1.0, 0.5}, {0.5, 1.0}});
}

struct Built {
    SystemSpec norm;
    SigmaResult sigma;
};

Built build(const SystemSpec& spec, int m, double tol, int max_iters = 600) {
    auto [norm, profiles] = normalized_system(spec);
    SigmaOptions opt;
    opt.tol = tol;
    opt.max_iters = max_iters;
    opt.threads = 2;
    auto sigma = construct_sigma(norm, direction_grid(spec.dim(), m), opt);
    return Built{std::move(norm), std::move(sigma)};
}

// criterion 1: decoupled logistic against the closed form, under 30 s
void criterion_1() {
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = true;
    std::string detail;

    const auto spec = logistic2();
    for (int i = 0; i < 2; ++i) {
        const double xhat = axis_fixed_point(spec, i).xhat;
        if (std::abs(xhat - 1.0) > 1e-8) {
            ok = false;
            detail += " xhat" + std::to_string(i) + "=" + fmt(xhat);
        }
    }

    SigmaOptions opt;
    opt.tol = 1e-6;
    opt.threads = 2;
    const auto sigma = construct_sigma(spec, direction_grid(2, 64), opt);
    if (!sigma.converged) {
        ok = false;
        detail += " not converged";
    }
    double sup = 0.0;
    for (size_t i = 0; i < sigma.sigma0.R.size(); ++i) {
        const auto& u = sigma.sigma0.grid->nodes[i];
        sup = std::max(sup, std::abs(sigma.sigma0.R[i] - 1.0 / std::max(u[0], u[1])));
    }
    if (sup > 1e-3) ok = false;

    const double runtime =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (runtime > 30.0) ok = false;
    report(1, ok, "logistic closed form: sup|R-R*|=" + fmt(sup) + " (<=1e-3), runtime " +
                      fmt(runtime) + "s (<30s)" + detail);
}

// criterion 2: symmetric autonomous LV, interior equilibrium and vertices
void criterion_2() {
    const auto built = build(symlv(), 64, 1e-7);
    bool ok = built.sigma.converged;
    double center = 0.0, v1 = 0.0, v2 = 0.0;
    const auto& grid = *built.sigma.sigma0.grid;
    for (size_t i = 0; i < grid.nodes.size(); ++i) {
        if (grid.nodes[i][0] == 0.5) center = built.sigma.sigma0.R[i];
        if (grid.nodes[i][0] == 1.0) v1 = built.sigma.sigma0.R[i];
        if (grid.nodes[i][1] == 1.0) v2 = built.sigma.sigma0.R[i];
    }
    if (std::abs(center - 4.0 / 3.0) > 1e-3) ok = false;
    if (std::abs(v1 - 1.0) > 1e-6 || std::abs(v2 - 1.0) > 1e-6) ok = false;
    report(2, ok, "symmetric LV: |R(.5,.5)-4/3|=" + fmt(std::abs(center - 4.0 / 3.0)) +
                      " (<=1e-3), vertex errors " + fmt(std::abs(v1 - 1.0)) + ", " +
                      fmt(std::abs(v2 - 1.0)) + " (<=1e-6)");
}

// criterion 3: seasonal-succession pipeline
void criterion_3() {
    const auto spec = seasonal();
    const auto h2 = check_H2(spec);
    bool ok = h2.passed && h2.values[0] == 1.0 && h2.values[1] == 1.0;

    const auto built = build(spec, 32, 1e-3, 200);
    if (!built.sigma.converged || built.sigma.final_gap >= 1e-3 ||
        built.sigma.iterations > 200)
        ok = false;

    const auto fam = section_family(built.norm, built.sigma.sigma0, 16, 1e-10, 2);
    if (fam.wraparound_error >= 5e-3) ok = false;
    report(3, ok, "seasonal: H2=(" + fmt(h2.values[0]) + "," + fmt(h2.values[1]) +
                      ") exact, gap " + fmt(built.sigma.final_gap) + " in " +
                      std::to_string(built.sigma.iterations) + " iters (<=200), wrap d_H " +
                      fmt(fam.wraparound_error) + " (<5e-3)");
}

// criterion 4: process identities at 10*tol over 100 random triples per spec
void criterion_4() {
    const double tol = 1e-10;
    bool ok = true;
    double worst = 0.0;
    const SystemSpec specs[] = {logistic2(), symlv(), seasonal()};
    Rng rng(1234);
    for (const auto& spec : specs) {
        for (int n = 0; n < 100; ++n) {
            const Vec x = rng.uniform_vec(2, 0.05, 1.1);
            const double t0 = rng.uniform(0.0, 1.0);
            const double t1 = t0 + rng.uniform(0.0, 1.0);
            const double t2 = t1 + rng.uniform(0.0, 1.0);

            const Vec direct = flow(spec, t0, t2, x, tol).x;
            const Vec mid = flow(spec, t0, t1, x, tol).x;
            const Vec chained = flow(spec, t1, t2, mid, tol).x;
            const Vec shifted = flow(spec, t0 + 1.0, t2 + 1.0, x, tol).x;
            const Vec back = flow(spec, t1, t0, mid, tol).x;

            worst = std::max(worst, norm2(sub(direct, chained)));
            worst = std::max(worst, norm2(sub(direct, shifted)));
            worst = std::max(worst, norm2(sub(back, x)));
        }
    }
    if (worst > 10.0 * tol) ok = false;
    report(4, ok, "flow identities: worst defect " + fmt(worst) + " (<=1e-9)");
}

// criterion 5: retrotonicity on 1000 filtered pairs per spec
void criterion_5() {
    bool ok = true;
    std::string detail;
    const SystemSpec specs[] = {logistic2(), symlv(), seasonal()};
    int si = 0;
    for (const auto& spec : specs) {
        const auto rep = check_retrotone(spec, 1000, {0.0, 0.0}, {1.1, 1.1}, 1e-9,
                                         77 + static_cast<std::uint64_t>(si));
        if (!rep.passed || rep.inconclusive) ok = false;
        detail += (si ? ", " : "") + std::to_string(static_cast<long>(rep.budget.at("pairs_used")));
        ++si;
    }
    report(5, ok, "retrotonicity: zero violations at 1e-9 on {" + detail + "} filtered pairs");
}

// criterion 6: unorderedness of the converged meshes
void criterion_6() {
    bool ok = true;
    const auto mesh_logistic = build(logistic2(), 64, 1e-6).sigma.sigma0;
    const auto b_sym = build(symlv(), 64, 1e-6);
    const auto b_sea = build(seasonal(), 64, 1e-6);

    if (!check_unordered(mesh_logistic, OrderMode::weak, 1e-3).passed) ok = false;
    if (!check_unordered(b_sym.sigma.sigma0, OrderMode::weak, 1e-3).passed) ok = false;
    if (!check_unordered(b_sea.sigma.sigma0, OrderMode::weak, 1e-3).passed) ok = false;

    // strict mode where the H4' evidence holds (all interactions positive)
    bool strict_ok = true;
    if (!check_H4(b_sym.norm, 2000, H4Mode::strict, 5).passed) strict_ok = false;
    if (!check_unordered(b_sym.sigma.sigma0, OrderMode::strict, 1e-3).passed) strict_ok = false;
    if (!check_H4(b_sea.norm, 2000, H4Mode::strict, 5).passed) strict_ok = false;
    if (!check_unordered(b_sea.sigma.sigma0, OrderMode::strict, 1e-3).passed) strict_ok = false;
    if (!strict_ok) ok = false;
    report(6, ok, std::string("weak unorderedness on all meshes; strict on the LV specs ") +
                      (strict_ok ? "(held)" : "(failed)"));
}

// criterion 7: attraction to the matching sections
void criterion_7() {
    bool ok = true;
    std::string detail;
    const SystemSpec specs[] = {logistic2(), symlv(), seasonal()};
    int si = 0;
    for (const auto& spec : specs) {
        const auto built = build(spec, 2048, 1e-9);
        const auto fam = section_family(built.norm, built.sigma.sigma0, 16, 1e-10, 2);
        const auto rep = check_attraction(built.norm, fam, 100, 20, 1e-3, 1e-6,
                                          42 + static_cast<std::uint64_t>(si));
        if (!rep.passed) ok = false;
        detail += (si ? ", " : "") + fmt(rep.worst_margin);
        ++si;
    }
    report(7, ok, "attraction within 20 periods: final distances {" + detail +
                      "} (<1e-3), tails non-increasing per phase (1e-6)");
}

// criterion 8: Lipschitz projection ratio bounds
void criterion_8() {
    bool ok = true;
    const double bound2 = std::sqrt(3.0) + 1e-9;
    double worst2 = 0.0;
    for (const auto& spec : {logistic2(), symlv(), seasonal()}) {
        const auto built = build(spec, 64, 1e-6);
        const auto rep = check_lipschitz_projection(built.sigma.sigma0);
        worst2 = std::max(worst2, rep.worst_margin);
        if (!rep.passed || rep.worst_margin > bound2) ok = false;
    }

    // d=3 smoke test at m=16
    const auto spec3 = make_decoupled_logistic(3);
    SigmaOptions opt;
    opt.tol = 1e-5;
    opt.threads = 2;
    const auto sigma3 = construct_sigma(spec3, direction_grid(3, 16), opt);
    const auto rep3 = check_lipschitz_projection(sigma3.sigma0);
    if (!sigma3.converged || rep3.worst_margin > 2.0 + 1e-9) ok = false;
    report(8, ok, "projection ratios: d=2 max " + fmt(worst2) + " (<=sqrt(3)), d=3 max " +
                      fmt(rep3.worst_margin) + " (<=2)");
}

// criterion 9: conjugacy diagram on the seasonal family
void criterion_9() {
    const double mesh_tol = 1e-3;  // criterion 3 construction tolerance
    const auto built = build(seasonal(), 32, mesh_tol, 200);
    const auto fam = section_family(built.norm, built.sigma.sigma0, 16, 1e-10, 2);
    const auto rep = check_conjugacy(built.norm, fam, 8, 1.0 / 16.0, 10.0 * mesh_tol, 11);
    report(9, !rep.passed ? false : true,
           "conjugacy on all 16 sections: worst error " + fmt(rep.worst_margin) + " (<=" +
               fmt(10.0 * mesh_tol) + ")");
}

// criterion 10: hausdorff against an independent brute-force implementation
void criterion_10() {
    Rng rng(4242);
    bool ok = true;
    for (int trial = 0; trial < 50; ++trial) {
        const int na = 1 + rng.uniform_int(200);
        const int nb = 1 + rng.uniform_int(200);
        const int d = 2 + rng.uniform_int(3);
        std::vector<Vec> A, B;
        for (int i = 0; i < na; ++i) A.push_back(rng.uniform_vec(d, -3.0, 3.0));
        for (int i = 0; i < nb; ++i) B.push_back(rng.uniform_vec(d, -3.0, 3.0));
        if (hausdorff(A, B) != oracles::brute_hausdorff(A, B)) ok = false;
    }
    report(10, ok, "hausdorff equals the brute-force oracle exactly on 50 random pairs");
}

}  // namespace

int main() {
    std::printf("acceptance suite (%s)\n", kVersion);
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    std::printf("%d criterion(s) failed\n", failures);
    return failures;
}
