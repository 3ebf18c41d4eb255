#include "csimplex/hypotheses.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace csimplex {

namespace {

// Simpson rule written as ((b-a)*(f0+4*fm+f1))/6, which is exact in IEEE
// arithmetic for constant integrands (needed for piecewise-constant specs).
double simpson(double a, double b, double f0, double fm, double f1) {
    return ((b - a) * (f0 + 4.0 * fm + f1)) / 6.0;
}

struct QuadState {
    const std::function<double(double)>& f;
    double tol;
    int max_depth;
    bool converged = true;
};

double adaptive_simpson_rec(QuadState& q, double a, double b, double fa, double fm,
                            double fb, double whole, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = q.f(lm), frm = q.f(rm);
    const double left = simpson(a, m, fa, flm, fm);
    const double right = simpson(m, b, fm, frm, fb);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * q.tol || b - a < 1e-14) {
        return left + right + delta / 15.0;
    }
    if (depth >= q.max_depth) {
        q.converged = false;
        return left + right;
    }
    return adaptive_simpson_rec(q, a, m, fa, flm, fm, left, depth + 1) +
           adaptive_simpson_rec(q, m, b, fm, frm, fb, right, depth + 1);
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, bool* converged) {
    QuadState q{f, std::max(tol, 1e-15), 48, true};
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    const double whole = simpson(a, b, fa, fm, fb);
    const double v = adaptive_simpson_rec(q, a, b, fa, fm, fb, whole, 0);
    if (converged) *converged = q.converged;
    return v;
}

}  // namespace

HypothesisReport check_H2(const SystemSpec& spec, double quad_tol) {
    HypothesisReport rep;
    rep.hypothesis = "H2";
    const int d = spec.dim();
    const Vec zero(static_cast<size_t>(d), 0.0);
    const auto& bp = spec.breakpoints();

    rep.values.assign(static_cast<size_t>(d), 0.0);
    double fevals = 0;
    for (int i = 0; i < d; ++i) {
        double integral = 0.0;
        for (size_t k = 0; k + 1 < bp.size(); ++k) {
            bool ok = true;
            auto f = [&](double t) {
                fevals += 1;
                // stay inside the piece: the right endpoint belongs to the next one
                const double s = std::min(t, std::nextafter(bp[k + 1], bp[k]));
                return spec.eval_g_i(i, spec.reduce_time(s), zero);
            };
            integral += adaptive_simpson(f, bp[k], bp[k + 1], quad_tol / static_cast<double>(bp.size()), &ok);
            if (!ok)
                throw NumericalError("H2 quadrature did not converge for species " +
                                     std::to_string(i));
        }
        rep.values[static_cast<size_t>(i)] = integral;
    }

    rep.passed = true;
    double worst = rep.values[0];
    int worst_i = 0;
    for (int i = 0; i < d; ++i) {
        if (rep.values[static_cast<size_t>(i)] <= quad_tol) rep.passed = false;
        if (rep.values[static_cast<size_t>(i)] < worst) {
            worst = rep.values[static_cast<size_t>(i)];
            worst_i = i;
        }
    }
    rep.witness = {{"species", static_cast<double>(worst_i)}, {"integral", worst}};
    rep.budget = {{"quad_tol", quad_tol}, {"feval", fevals}};
    return rep;
}

HypothesisReport check_H3tilde(const SystemSpec& spec, double M, int samples) {
    if (!(M > 0.0)) throw InputError("M must be positive");
    if (samples < 1) throw InputError("samples must be >= 1");
    HypothesisReport rep;
    rep.hypothesis = "H3tilde";
    const int d = spec.dim();
    const auto& bp = spec.breakpoints();

    rep.values.assign(static_cast<size_t>(d), -std::numeric_limits<double>::infinity());
    rep.passed = true;
    double worst = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < d; ++i) {
        Vec Mei(static_cast<size_t>(d), 0.0);
        Mei[static_cast<size_t>(i)] = M;
        double vmax = -std::numeric_limits<double>::infinity();
        for (size_t k = 0; k + 1 < bp.size(); ++k) {
            const double a = bp[k], b = bp[k + 1];
            for (int s = 0; s < samples; ++s) {
                // left endpoint plus midpoint grid; right endpoint is the next piece's
                const double t = (s == 0) ? a : a + (b - a) * (2.0 * s - 1.0) / (2.0 * samples);
                const double g = spec.eval_g_i(i, spec.reduce_time(t), Mei);
                if (g > vmax) vmax = g;
                if (g > 0.0) {
                    rep.passed = false;
                    if (g > worst) {
                        worst = g;
                        rep.witness = {{"species", static_cast<double>(i)}, {"t", t}, {"g", g}};
                    }
                }
            }
        }
        rep.values[static_cast<size_t>(i)] = vmax;
    }
    rep.budget = {{"M", M}, {"samples_per_piece", static_cast<double>(samples)}};
    return rep;
}

HypothesisReport find_H3tilde_M(const SystemSpec& spec, double M_cap, int samples) {
    double M = 1.0;
    HypothesisReport rep;
    while (true) {
        rep = check_H3tilde(spec, M, samples);
        if (rep.passed || M >= M_cap) return rep;
        M *= 2.0;
    }
}

HypothesisReport check_H4(const SystemSpec& spec, int pairs, H4Mode mode,
                          std::uint64_t seed) {
    if (pairs < 1) throw InputError("pairs must be >= 1");
    HypothesisReport rep;
    rep.hypothesis = (mode == H4Mode::weak) ? "H4" : "H4strict";
    const int d = spec.dim();
    Rng rng(seed);

    const double box_hi = 3.0;
    std::vector<int> strict_seen(static_cast<size_t>(d * d), 0);
    Vec worst_increase(static_cast<size_t>(d), 0.0);
    bool ok = true;

    for (int n = 0; n < pairs; ++n) {
        const double t = rng.uniform(0.0, spec.period());
        Vec x = rng.uniform_vec(d, 0.0, box_hi);
        const int j = rng.uniform_int(d);
        const double h = rng.uniform(1e-3, 1.0);
        Vec y = x;
        y[static_cast<size_t>(j)] += h;

        const Vec gx = spec.eval_g(t, x);
        const Vec gy = spec.eval_g(t, y);
        for (int i = 0; i < d; ++i) {
            const double diff = gy[static_cast<size_t>(i)] - gx[static_cast<size_t>(i)];
            const double slack = 1e-12 * (1.0 + std::abs(gx[static_cast<size_t>(i)]));
            if (diff > slack) {
                ok = false;
                if (diff > worst_increase[static_cast<size_t>(i)]) {
                    worst_increase[static_cast<size_t>(i)] = diff;
                    rep.witness = {{"t", t}, {"i", static_cast<double>(i)},
                                   {"j", static_cast<double>(j)}, {"h", h},
                                   {"increase", diff}};
                    for (int c = 0; c < d; ++c)
                        rep.witness["x" + std::to_string(c + 1)] = x[static_cast<size_t>(c)];
                }
            }
            if (-diff > 1e-10 * h)  // strict decrease beyond rounding
                strict_seen[static_cast<size_t>(i * d + j)] += 1;
        }
    }

    if (mode == H4Mode::weak) {
        rep.values = worst_increase;
        rep.passed = ok;
    } else {
        rep.values.resize(static_cast<size_t>(d * d));
        bool all_pairs = true;
        int worst_i = 0, worst_j = 0;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) {
                const double frac = static_cast<double>(strict_seen[static_cast<size_t>(i * d + j)]) /
                                    std::max(1, pairs / d);
                rep.values[static_cast<size_t>(i * d + j)] = frac;
                if (strict_seen[static_cast<size_t>(i * d + j)] == 0) {
                    all_pairs = false;
                    worst_i = i;
                    worst_j = j;
                }
            }
        rep.passed = ok && all_pairs;
        if (!all_pairs)
            rep.witness = {{"i", static_cast<double>(worst_i)},
                           {"j", static_cast<double>(worst_j)},
                           {"strict_observations", 0.0}};
    }
    rep.budget = {{"pairs", static_cast<double>(pairs)},
                  {"seed", static_cast<double>(seed)},
                  {"box_hi", box_hi}};
    return rep;
}

}  // namespace csimplex
