#include "csimplex/poincare.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace csimplex {

namespace {

// Gauss-Legendre nodes/weights on [-1,1] via Newton iteration on P_n.
struct GaussRule {
    std::vector<double> nodes, weights;
};

GaussRule gauss_legendre(int n) {
    GaussRule r;
    r.nodes.resize(static_cast<size_t>(n));
    r.weights.resize(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
        double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int j = 2; j <= n; ++j) {
                const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
                p0 = p1;
                p1 = p2;
            }
            const double dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        double p0 = 1.0, p1 = x;
        for (int j = 2; j <= n; ++j) {
            const double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
            p0 = p1;
            p1 = p2;
        }
        const double dp = n * (x * p1 - p0) / (x * x - 1.0);
        r.nodes[static_cast<size_t>(n - 1 - k)] = x;
        r.weights[static_cast<size_t>(n - 1 - k)] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return r;
}

const GaussRule& gl12() {
    static const GaussRule r = gauss_legendre(12);
    return r;
}

}  // namespace

Vec poincare_map(const SystemSpec& spec, const Vec& x, double tol) {
    return flow(spec, 0.0, spec.period(), x, tol).x;
}

Vec poincare_iter(const SystemSpec& spec, const Vec& x, int n, double tol) {
    if (n < 0) throw InputError("iteration count must be >= 0");
    Vec v = x;
    for (int k = 0; k < n; ++k) v = poincare_map(spec, v, tol);
    return v;
}

Vec fitness(const SystemSpec& spec, const Vec& x, double tol) {
    const int d = spec.dim();
    const double T = spec.period();
    const auto& bp = spec.breakpoints();
    const GaussRule& gl = gl12();

    // quadrature nodes, piecewise over the smooth intervals
    std::vector<double> times;
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        const double a = bp[k], b = bp[k + 1];
        const int panels = std::max(2, static_cast<int>(std::ceil((b - a) / T * 8.0)));
        for (int p = 0; p < panels; ++p) {
            const double pa = a + (b - a) * p / panels;
            const double pb = a + (b - a) * (p + 1) / panels;
            for (double xi : gl.nodes) times.push_back(0.5 * (pa + pb) + 0.5 * (pb - pa) * xi);
        }
    }

    const std::vector<FlowResult> traj = flow_trajectory(spec, 0.0, times, x, tol);

    Vec integral(static_cast<size_t>(d), 0.0);
    size_t node = 0;
    for (size_t k = 0; k + 1 < bp.size(); ++k) {
        const double a = bp[k], b = bp[k + 1];
        const int panels = std::max(2, static_cast<int>(std::ceil((b - a) / T * 8.0)));
        for (int p = 0; p < panels; ++p) {
            const double pa = a + (b - a) * p / panels;
            const double pb = a + (b - a) * (p + 1) / panels;
            const double half = 0.5 * (pb - pa);
            for (size_t q = 0; q < gl.nodes.size(); ++q, ++node) {
                const Vec g = spec.eval_g(times[node], traj[node].x);
                for (int i = 0; i < d; ++i)
                    integral[static_cast<size_t>(i)] += half * gl.weights[q] * g[static_cast<size_t>(i)];
            }
        }
    }

    Vec f(static_cast<size_t>(d));
    for (int i = 0; i < d; ++i) f[static_cast<size_t>(i)] = std::exp(integral[static_cast<size_t>(i)]);
    return f;
}

double axis_map(const SystemSpec& spec, int i, double x, double tol) {
    if (i < 0 || i >= spec.dim()) throw InputError("species index out of range");
    if (x < 0.0) throw InputError("axis coordinate must be nonnegative");
    Vec xe(static_cast<size_t>(spec.dim()), 0.0);
    xe[static_cast<size_t>(i)] = x;
    return flow(spec, 0.0, spec.period(), xe, tol).x[static_cast<size_t>(i)];
}

AxisProfile axis_fixed_point(const SystemSpec& spec, int i, const AxisSolveOptions& opt) {
    AxisProfile prof;
    prof.i = i;
    auto H = [&](double x) { return axis_map(spec, i, x, opt.flow_tol); };

    // doubling search for H(M) <= M; forward blow-up on the axis is the same
    // verdict (no bounded dissipative scale exists)
    double M = 1.0;
    while (true) {
        try {
            if (H(M) <= M) break;
        } catch (const BlowUpError&) {
            throw HypothesisFailure("H3tilde", "axis " + std::to_string(i) +
                                                   " blows up forward; no dissipative M exists");
        }
        M *= 2.0;
        ++prof.iterations;
        if (M > opt.M_search)
            throw HypothesisFailure("H3tilde", "no M <= M_search with H_" + std::to_string(i) +
                                                   "(M) <= M; axis dynamics unbounded?");
    }

    // monotone iteration from above: the iterates H^n(M) do not increase
    double hi = M;
    double lo = 0.0;
    for (int it = 0; it < opt.max_monotone; ++it) {
        const double next = H(hi);
        ++prof.iterations;
        if (next >= hi) break;            // fixed point (or below) reached
        if (hi - next < 1e-3 * (1.0 + hi)) {
            hi = next;
            break;
        }
        hi = next;
    }

    // lower bracket: walk down until the map pushes upward
    double probe = hi;
    for (int k = 0; k < 64; ++k) {
        probe *= 0.5;
        ++prof.iterations;
        if (probe <= 0.0) break;
        if (H(probe) > probe) {
            lo = probe;
            break;
        }
        hi = probe;  // still above the fixed point
    }
    if (lo == 0.0)
        throw NumericalError("axis fixed point bracket failed for species " + std::to_string(i));

    // bisection on H(x) - x
    while (hi - lo > opt.tol) {
        const double mid = 0.5 * (lo + hi);
        ++prof.iterations;
        if (H(mid) > mid) lo = mid; else hi = mid;
        if (prof.iterations > opt.max_monotone + 200)
            throw NumericalError("axis fixed point bisection stalled for species " +
                                 std::to_string(i));
    }
    prof.xhat = 0.5 * (lo + hi);
    prof.residual = std::abs(H(prof.xhat) - prof.xhat);

    // sample the T-periodic axis orbit psi_i
    Vec x0(static_cast<size_t>(spec.dim()), 0.0);
    x0[static_cast<size_t>(i)] = prof.xhat;
    std::vector<double> ts;
    for (int k = 0; k < opt.psi_samples; ++k)
        ts.push_back(spec.period() * k / (opt.psi_samples - 1));
    const auto traj = flow_trajectory(spec, 0.0, ts, x0, opt.flow_tol);
    for (size_t k = 0; k < traj.size(); ++k)
        prof.psi.emplace_back(ts[k], traj[k].x[static_cast<size_t>(i)]);
    return prof;
}

std::vector<AxisProfile> compute_all_axis_profiles(const SystemSpec& spec,
                                                   const AxisSolveOptions& opt) {
    std::vector<AxisProfile> out;
    out.reserve(static_cast<size_t>(spec.dim()));
    for (int i = 0; i < spec.dim(); ++i) out.push_back(axis_fixed_point(spec, i, opt));
    return out;
}

std::pair<SystemSpec, std::vector<AxisProfile>> normalized_system(
    const SystemSpec& spec, const AxisSolveOptions& opt) {
    std::vector<AxisProfile> profiles = compute_all_axis_profiles(spec, opt);
    Vec xhat;
    for (const auto& p : profiles) xhat.push_back(p.xhat);
    return {normalize(spec, xhat), std::move(profiles)};
}

}  // namespace csimplex
