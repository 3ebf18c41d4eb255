#include "doctest.h"

#include <cmath>

#include "csimplex/poincare.hpp"
#include "csimplex/verify.hpp"
#include "oracles.hpp"

using namespace csimplex;

namespace {

struct Fixture {
    SystemSpec norm;
    SigmaResult sigma;
    SectionFamily family;
};

// one shared logistic pipeline for the checks below (m kept small for speed)
const Fixture& logistic_fixture() {
    static const Fixture fix = [] {
        auto spec = make_decoupled_logistic(2);
        SigmaOptions opt;
        opt.tol = 1e-7;
        auto sigma = construct_sigma(spec, direction_grid(2, 64), opt);
        auto family = section_family(spec, sigma.sigma0, 8);
        return Fixture{std::move(spec), std::move(sigma), std::move(family)};
    }();
    return fix;
}

}  // namespace

TEST_CASE("unordered point-set examples") {
    const std::vector<Vec> clean{{1.0, 0.5}, {0.5, 1.0}};
    CHECK(check_unordered_points(clean, OrderMode::weak, 1e-9).passed);
    CHECK(check_unordered_points(clean, OrderMode::strict, 1e-9).passed);

    const std::vector<Vec> strong{{1.0, 1.0}, {0.5, 0.5}};
    const auto weak = check_unordered_points(strong, OrderMode::weak, 1e-9);
    CHECK_FALSE(weak.passed);
    CHECK(weak.witness.count("x1") == 1);

    const std::vector<Vec> ordered{{1.0, 1.0}, {1.0, 0.5}};
    CHECK(check_unordered_points(ordered, OrderMode::weak, 1e-9).passed);
    CHECK_FALSE(check_unordered_points(ordered, OrderMode::strict, 1e-9).passed);
}

TEST_CASE("converged meshes are weakly unordered at mesh tolerance") {
    const auto& fix = logistic_fixture();
    CHECK(check_unordered(fix.sigma.sigma0, OrderMode::weak, 1e-3).passed);
    // box boundary has ordered (not strongly ordered) pairs: strict fails
    CHECK_FALSE(check_unordered(fix.sigma.sigma0, OrderMode::strict, 1e-3).passed);
}

TEST_CASE("retrotone check on the logistic and a mutualistic counterexample") {
    const auto logistic = make_decoupled_logistic(2);
    const auto rep = check_retrotone(logistic, 300, {0.0, 0.0}, {1.1, 1.1}, 1e-9, 31);
    CHECK(rep.passed);
    CHECK_FALSE(rep.inconclusive);
    CHECK(rep.budget.at("pairs_used") >= 300);

    // strong mutualism violates pullback of the order
    const auto mutual = make_lv_constant(1.0, {1.0, 1.0}, {{1.0, -2.0}, {0.0, 1.0}});
    const auto bad = check_retrotone(mutual, 400, {0.0, 0.0}, {1.2, 1.2}, 1e-9, 31);
    CHECK_FALSE(bad.passed);
    CHECK(bad.witness.count("x1") == 1);

    // an over-filtered request comes back inconclusive
    const auto few = check_retrotone(logistic, 1, {0.0, 0.0}, {1.1, 1.1}, 1e-9, 31);
    CHECK(few.inconclusive);
}

TEST_CASE("attraction to the section family") {
    const auto& fix = logistic_fixture();
    // horizon long enough that the slowest transient clears 1e-3 by mid-run
    const auto rep = check_attraction(fix.norm, fix.family, 20, 18, 1e-3, 1e-5, 42);
    CHECK(rep.passed);
    CHECK(rep.worst_margin < 1e-3);

    // a start already on the mesh stays within interpolation accuracy
    const Vec on_mesh = fix.sigma.sigma0.point(32);
    auto traj = flow_trajectory(fix.norm, 0.0, {1.0, 2.0, 3.0}, on_mesh, 1e-10);
    for (const auto& r : traj)
        CHECK(point_to_mesh_distance(r.x, fix.sigma.sigma0) < 1e-4);
}

TEST_CASE("origin repeller evidence") {
    const auto& fix = logistic_fixture();
    const auto rep = check_origin_repeller(fix.norm, fix.family, 10, 1e-9, 7);
    CHECK(rep.passed);

    // outside the attractor the backward flow escapes
    CHECK_THROWS_AS(flow(fix.norm, 0.0, -6.0, {1.5, 1.5}, 1e-10), BlowUpError);

    // a mesh point stays near the family backward over a period:
    // the corner node is the interior fixed point
    for (size_t i = 0; i < fix.sigma.sigma0.R.size(); ++i)
        if (fix.sigma.sigma0.grid->nodes[i][0] == 0.5) {
            const Vec corner = fix.sigma.sigma0.point(static_cast<int>(i));
            const auto back = flow(fix.norm, 0.0, -1.0, corner, 1e-10);
            CHECK(point_to_mesh_distance(back.x, fix.sigma.sigma0) < 1e-4);
        }
}

TEST_CASE("asymptotic phase partner") {
    const auto& fix = logistic_fixture();

    // a mesh point is its own partner
    const Vec node = fix.sigma.sigma0.point(16);
    const auto self = check_asymptotic_phase(fix.norm, node, fix.sigma.sigma0, 10, 1e-3);
    CHECK(self.passed);
    CHECK(self.budget.at("partner_node") == 16.0);
    CHECK(self.worst_margin <= 1e-9);

    // generic point: terminal difference collapses
    const auto rep = check_asymptotic_phase(fix.norm, {0.3, 0.7}, fix.sigma.sigma0, 14, 1e-3);
    CHECK(rep.passed);
    CHECK(rep.worst_margin < 1e-4);

    // radial collapse: a scaled copy of a simplex point still has a partner
    // (for this system all interior orbits merge toward the corner, so the
    // argmin is noise-level among near-equivalent partners; only the phase
    // property itself is asserted)
    const Vec scaled{0.5 * node[0], 0.5 * node[1]};
    const auto rep2 = check_asymptotic_phase(fix.norm, scaled, fix.sigma.sigma0, 14, 1e-3);
    CHECK(rep2.passed);
    CHECK(rep2.budget.at("terminal_iterate_distance") <= 1e-3);

    CHECK_THROWS_AS(check_asymptotic_phase(fix.norm, {0.0, 0.0}, fix.sigma.sigma0, 10, 1e-3),
                    InputError);
}

TEST_CASE("lipschitz projection bound") {
    // formula check: Pi(1,0) = (0.5, -0.5)
    const Vec p = project_along_diagonal({1.0, 0.0});
    CHECK(p[0] == doctest::Approx(0.5));
    CHECK(p[1] == doctest::Approx(-0.5));

    const auto& fix = logistic_fixture();
    const auto rep = check_lipschitz_projection(fix.sigma.sigma0);
    CHECK(rep.passed);
    CHECK(rep.budget.at("bound") == doctest::Approx(std::sqrt(3.0)));
    // the ideal box boundary attains sqrt(2) at the corner; the computed mesh
    // inflates the ratio slightly (near-axis radial bias over one node spacing)
    CHECK(rep.worst_margin >= std::sqrt(2.0) - 1e-3);
    CHECK(rep.worst_margin <= std::sqrt(3.0) + 1e-9);
}

TEST_CASE("conjugacy with the projected process") {
    const auto& fix = logistic_fixture();
    const auto rep = check_conjugacy(fix.norm, fix.family, 6, 0.125, 1e-2, 3);
    CHECK(rep.passed);
    CHECK(rep.worst_margin <= 1e-2);
    CHECK(rep.budget.at("worst_reconstruction") <= 1e-2);

    // zero time step: both paths are the identity
    const auto id = check_conjugacy(fix.norm, fix.family, 4, 0.0, 1e-6, 3);
    CHECK(id.passed);

    // a full period: both paths land on the projected image of the period map
    const auto full = check_conjugacy(fix.norm, fix.family, 4, 1.0, 1e-2, 3);
    CHECK(full.passed);
}
