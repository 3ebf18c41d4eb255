#include "doctest.h"

#include <cmath>

#include "csimplex/system.hpp"

using namespace csimplex;

namespace {

SystemSpec seasonal_default() {
    return make_lv_seasonal(1.0, {1.0, 1.0}, 0.5, {3.0, 3.0}, {{1.0, 0.5}, {0.5, 1.0}});
}

}  // namespace

TEST_CASE("decoupled logistic growth rates") {
    const auto spec = make_decoupled_logistic(2);
    const Vec g = spec.eval_g(0.3, {0.5, 0.2});
    CHECK(g[0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g[1] == doctest::Approx(0.8).epsilon(1e-15));
}

TEST_CASE("seasonal dormant season rates") {
    const auto spec = seasonal_default();
    const Vec g = spec.eval_g(0.1, {0.0, 0.0});
    CHECK(g[0] == -1.0);
    CHECK(g[1] == -1.0);
    // growth season at the same state
    const Vec gg = spec.eval_g(0.75, {0.0, 0.0});
    CHECK(gg[0] == 3.0);
    CHECK(gg[1] == 3.0);
}

TEST_CASE("eval_g is bit-exactly periodic at representable times") {
    const auto seasonal = seasonal_default();
    std::vector<TrigPoly> r(2);
    r[0] = TrigPoly(1.0);
    r[0].cos_c = {0.3};
    r[1] = TrigPoly(0.5);
    r[1].sin_c = {0.2, 0.1};
    std::vector<std::vector<TrigPoly>> a(2, std::vector<TrigPoly>(2, TrigPoly(0.25)));
    const auto smooth = make_lv_smooth(1.0, r, a);

    const Vec x{0.37, 1.21};
    for (int k = 0; k < 64; ++k) {
        const double t = static_cast<double>(k) / 64.0;  // dyadic: t+T exact
        for (const SystemSpec& spec : {seasonal, smooth}) {
            const Vec g0 = spec.eval_g(t, x);
            const Vec g1 = spec.eval_g(t + 1.0, x);
            const Vec g2 = spec.eval_g(t + 2.0, x);
            for (int i = 0; i < 2; ++i) {
                CHECK(g0[static_cast<size_t>(i)] == g1[static_cast<size_t>(i)]);
                CHECK(g0[static_cast<size_t>(i)] == g2[static_cast<size_t>(i)]);
            }
        }
    }
}

TEST_CASE("eval_G vanishes on the coordinate faces") {
    const auto logistic = make_decoupled_logistic(2);
    CHECK(logistic.eval_G(0.0, {0.0, 0.0}) == Vec{0.0, 0.0});
    const Vec G = logistic.eval_G(0.0, {0.5, 0.0});
    CHECK(G[0] == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(G[1] == 0.0);

    const auto seasonal = make_lv_seasonal(1.0, {1.0, 2.0}, 0.5, {3.0, 3.0},
                                           {{1.0, 0.5}, {0.5, 1.0}});
    const Vec Gd = seasonal.eval_G(0.1, {1.0, 1.0});
    CHECK(Gd[0] == -1.0);
    CHECK(Gd[1] == -2.0);
}

TEST_CASE("eval_G face zeros on random samples") {
    const auto spec = seasonal_default();
    Rng rng(7);
    for (int n = 0; n < 200; ++n) {
        Vec x = rng.uniform_vec(2, 0.0, 2.0);
        const int z = rng.uniform_int(2);
        x[static_cast<size_t>(z)] = 0.0;
        const Vec G = spec.eval_G(rng.uniform(0.0, 5.0), x);
        CHECK(G[static_cast<size_t>(z)] == 0.0);
    }
}

TEST_CASE("input validation") {
    const auto spec = make_decoupled_logistic(2);
    CHECK_THROWS_AS(spec.eval_g(0.0, {-0.1, 0.5}), InputError);
    CHECK_THROWS_AS(spec.eval_g(std::nan(""), {0.1, 0.5}), InputError);
    CHECK_THROWS_AS(spec.eval_g(0.0, {0.1, std::nan("")}), InputError);
    CHECK_THROWS_AS(spec.eval_g(0.0, {0.1}), InputError);
    CHECK_THROWS_AS(make_lv_seasonal(1.0, {1.0}, 1.5, {3.0}, {{1.0}}), InputError);
    CHECK_THROWS_AS(SystemSpec(0, 1.0, {}, {}, Family::lv_smooth), InputError);
    CHECK_THROWS_AS(SystemSpec(1, -1.0, {}, {}, Family::lv_smooth), InputError);
}

TEST_CASE("normalization rescales the state") {
    // g = 1 - x/2 has axis fixed point 2; normalized system is plain logistic
    std::vector<TrigPoly> r{TrigPoly(1.0)};
    std::vector<std::vector<TrigPoly>> a{{TrigPoly(0.5)}};
    const auto spec = make_lv_smooth(1.0, r, a);
    const auto norm = normalize(spec, {2.0});
    CHECK(norm.normalized());
    for (double x : {0.0, 0.3, 1.0, 1.7}) {
        CHECK(norm.eval_g(0.2, {x})[0] == doctest::Approx(1.0 - x).epsilon(1e-15));
        // definitional identity: new g(x) = old g(diag(xhat) x)
        CHECK(norm.eval_g(0.2, {x})[0] ==
              doctest::Approx(spec.eval_g(0.2, {2.0 * x})[0]).epsilon(1e-15));
    }

    const auto unchanged = normalize(spec, {1.0});
    CHECK(unchanged.eval_g(0.1, {0.7})[0] == spec.eval_g(0.1, {0.7})[0]);

    CHECK_THROWS_AS(normalize(spec, {0.0}), InputError);
    CHECK_THROWS_AS(normalize(spec, {-1.0}), InputError);
}

TEST_CASE("spec JSON round trip") {
    const std::string text = R"({
        "d": 2, "T": 1.0, "family": "lv_seasonal",
        "params": {"lambda": [1.0, 1.0], "phi": 0.5, "r": [3.0, 3.0],
                   "a": [[1.0, 0.5], [0.5, 1.0]]}
    })";
    const auto spec = load_system_json(text);
    const auto ref = seasonal_default();
    CHECK(spec.dim() == 2);
    CHECK(spec.period() == 1.0);
    CHECK(spec.family() == Family::lv_seasonal);
    for (double t : {0.1, 0.6, 0.99}) {
        const Vec x{0.4, 1.3};
        CHECK(spec.eval_g(t, x)[0] == ref.eval_g(t, x)[0]);
        CHECK(spec.eval_g(t, x)[1] == ref.eval_g(t, x)[1]);
    }

    // emitted JSON parses back to the same system
    const auto again = load_system_json(system_to_json(spec));
    CHECK(again.eval_g(0.7, {0.4, 1.3})[0] == ref.eval_g(0.7, {0.4, 1.3})[0]);

    CHECK_THROWS_AS(load_system_json("{not json"), InputError);
    CHECK_THROWS_AS(load_system_json(R"({"d":2,"T":1.0,"family":"bogus","params":{}})"),
                    InputError);
    CHECK_THROWS_AS(load_system_json(R"({"d":2,"T":1.0,"family":"lv_smooth","params":{}})"),
                    InputError);
}

TEST_CASE("custom piecewise spec with trig coefficients") {
    const std::string text = R"({
        "d": 1, "T": 2.0, "family": "custom_piecewise",
        "params": {"breakpoints": [0.5],
                   "pieces": [{"r": [{"const": 1.0, "cos": [0.5]}], "a": [[1.0]]},
                              {"r": [-0.25], "a": [[0.0]]}]}
    })";
    const auto spec = load_system_json(text);
    CHECK(spec.pieces().size() == 2);
    // first piece: r(t) = 1 + 0.5 cos(pi t)
    CHECK(spec.eval_g(0.0, {0.0})[0] == doctest::Approx(1.5).epsilon(1e-15));
    // second piece is constant in x
    CHECK(spec.eval_g(1.0, {3.0})[0] == -0.25);
}
