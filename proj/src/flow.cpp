#include "csimplex/flow.hpp"

#include <algorithm>
#include <cmath>

namespace csimplex {

TorusPoint torus_point(double t, double T) {
    double s = std::fmod(t, T);
    if (s < 0.0) s += T;
    if (s >= T) s = 0.0;
    return TorusPoint{s};
}

double torus_distance(TorusPoint a, TorusPoint b, double T) {
    const double d = std::abs(a.s - b.s);
    return std::min(d, T - d);
}

std::vector<int> support_of(const Vec& x) {
    std::vector<int> s;
    for (size_t i = 0; i < x.size(); ++i)
        if (x[i] > 0.0) s.push_back(static_cast<int>(i));
    return s;
}

namespace {

// Dormand-Prince 5(4), FSAL.  b7 = 0, so the boundary nudging below never
// touches the 5th-order solution, only the error estimate.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

// Internal controller safety: target 0.2*tol of accumulated error per period
// so the process identities hold within the documented 10*tol budget.
constexpr double kTargetFraction = 0.2;

struct Stepper {
    const SystemSpec& spec;
    const std::vector<int>& support;  // global indices of the integrated coords
    int n;                            // = support.size()
    double y_cap;
    Vec x_scratch;                    // full-dimensional state, zeros off support

    Stepper(const SystemSpec& s, const std::vector<int>& sup, double cap)
        : spec(s), support(sup), n(static_cast<int>(sup.size())), y_cap(cap),
          x_scratch(static_cast<size_t>(s.dim()), 0.0) {}

    // dy_i/dt = g_i(t, exp(y) on the support face).  The cap is enforced at
    // stage level: near a blow-up the right-hand side stiffens so fast that
    // accepted steps alone would stall before |y| reaches any fixed bound.
    void rhs(double t, const Vec& y, Vec& dy) {
        for (int i = 0; i < n; ++i) {
            const double yi = y[static_cast<size_t>(i)];
            if (std::abs(yi) > y_cap)
                throw BlowUpError(t, support[static_cast<size_t>(i)]);
            x_scratch[static_cast<size_t>(support[static_cast<size_t>(i)])] = std::exp(yi);
        }
        const double s = spec.reduce_time(t);
        for (int i = 0; i < n; ++i)
            dy[static_cast<size_t>(i)] =
                spec.eval_g_i(support[static_cast<size_t>(i)], s, x_scratch);
    }
};

// Smallest lattice point {tau_k + m T} strictly beyond t in direction dir.
double next_lattice_stop(const SystemSpec& spec, double t, int dir) {
    const double T = spec.period();
    const auto& bp = spec.breakpoints();
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() *
                         std::max(T, std::abs(t));
    const double base = std::floor(t / T) * T;
    if (dir > 0) {
        for (size_t k = 0; k < bp.size(); ++k) {
            const double c = base + bp[k];
            if (c - t > slack) return c;
        }
        return base + T + bp[1];
    }
    for (size_t k = bp.size(); k-- > 0;) {
        const double c = base + bp[k];
        if (t - c > slack) return c;
    }
    return base - T + bp[bp.size() - 2];
}

inline double nudge(double t, double toward) { return std::nextafter(t, toward); }

}  // namespace

FlowResult flow(const SystemSpec& spec, double t0, double t1, const Vec& x0,
                const FlowOptions& opt) {
    if (!std::isfinite(t0) || !std::isfinite(t1)) throw InputError("non-finite time bounds");
    if (x0.size() != static_cast<size_t>(spec.dim())) throw InputError("state dimension mismatch");
    for (double v : x0) {
        if (!std::isfinite(v)) throw InputError("non-finite initial state");
        if (v < 0.0) throw InputError("initial state must be componentwise nonnegative");
    }
    if (!(opt.tol > 0.0)) throw InputError("tolerance must be positive");

    FlowResult res;
    res.t0 = t0;
    res.t1 = t1;
    res.support = support_of(x0);
    res.x = x0;
    if (t1 == t0 || res.support.empty()) return res;

    const int n = static_cast<int>(res.support.size());
    Vec y(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i)
        y[static_cast<size_t>(i)] = std::log(x0[static_cast<size_t>(res.support[static_cast<size_t>(i)])]);

    Stepper st(spec, res.support, opt.y_cap);
    const double T = spec.period();
    const int dir = (t1 > t0) ? 1 : -1;
    const double tau = kTargetFraction * opt.tol / T;  // admissible error per unit time

    Vec k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()),
        k6(y.size()), k7(y.size()), ytmp(y.size()), ynew(y.size()), yerr(y.size());

    double t = t0;
    double h = static_cast<double>(dir) * std::min(T / 100.0, std::abs(t1 - t0));
    long steps = 0;
    bool have_k1 = false;

    while ((t1 - t) * dir > 0.0) {
        const double stop = next_lattice_stop(spec, t, dir);
        const double seg_end = (dir > 0) ? std::min(stop, t1) : std::max(stop, t1);

        // integrate the smooth segment [t, seg_end]
        while ((seg_end - t) * dir > 0.0) {
            if (++steps > opt.max_steps)
                throw NumericalError("flow exceeded the step budget");
            const double h_floor =
                16.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(t), T);
            if (std::abs(h) < h_floor) h = static_cast<double>(dir) * h_floor;
            const double h_proposed = h;  // restored after a landing
            bool landing = false;
            if (std::abs(h) >= std::abs(seg_end - t)) {
                h = seg_end - t;
                landing = true;
            }

            if (!have_k1) {
                st.rhs(nudge(t, t + dir), y, k1);
                have_k1 = true;
            }
            for (int i = 0; i < n; ++i)
                ytmp[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] + h * a21 * k1[static_cast<size_t>(i)];
            st.rhs(t + c2 * h, ytmp, k2);
            for (int i = 0; i < n; ++i)
                ytmp[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] +
                    h * (a31 * k1[static_cast<size_t>(i)] + a32 * k2[static_cast<size_t>(i)]);
            st.rhs(t + c3 * h, ytmp, k3);
            for (int i = 0; i < n; ++i)
                ytmp[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] +
                    h * (a41 * k1[static_cast<size_t>(i)] + a42 * k2[static_cast<size_t>(i)] +
                         a43 * k3[static_cast<size_t>(i)]);
            st.rhs(t + c4 * h, ytmp, k4);
            for (int i = 0; i < n; ++i)
                ytmp[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] +
                    h * (a51 * k1[static_cast<size_t>(i)] + a52 * k2[static_cast<size_t>(i)] +
                         a53 * k3[static_cast<size_t>(i)] + a54 * k4[static_cast<size_t>(i)]);
            st.rhs(t + c5 * h, ytmp, k5);
            const double t_end = landing ? seg_end : t + h;
            const double t_end_eval = nudge(t_end, t);  // stay inside the current piece
            for (int i = 0; i < n; ++i)
                ytmp[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] +
                    h * (a61 * k1[static_cast<size_t>(i)] + a62 * k2[static_cast<size_t>(i)] +
                         a63 * k3[static_cast<size_t>(i)] + a64 * k4[static_cast<size_t>(i)] +
                         a65 * k5[static_cast<size_t>(i)]);
            st.rhs(t_end_eval, ytmp, k6);
            for (int i = 0; i < n; ++i)
                ynew[static_cast<size_t>(i)] = y[static_cast<size_t>(i)] +
                    h * (b1 * k1[static_cast<size_t>(i)] + b3 * k3[static_cast<size_t>(i)] +
                         b4 * k4[static_cast<size_t>(i)] + b5 * k5[static_cast<size_t>(i)] +
                         b6 * k6[static_cast<size_t>(i)]);
            st.rhs(t_end_eval, ynew, k7);

            double err = 0.0;
            double kmax = 0.0;
            for (int i = 0; i < n; ++i) {
                yerr[static_cast<size_t>(i)] = h *
                    (e1 * k1[static_cast<size_t>(i)] + e3 * k3[static_cast<size_t>(i)] +
                     e4 * k4[static_cast<size_t>(i)] + e5 * k5[static_cast<size_t>(i)] +
                     e6 * k6[static_cast<size_t>(i)] + e7 * k7[static_cast<size_t>(i)]);
                err = std::max(err, std::abs(yerr[static_cast<size_t>(i)]));
                kmax = std::max({kmax, std::abs(k1[static_cast<size_t>(i)]),
                                 std::abs(k7[static_cast<size_t>(i)])});
            }

            // the estimator cannot resolve below the roundoff of the stage
            // derivatives; without this floor a stiff blow-up rejects forever
            const double noise = 4.0 * std::numeric_limits<double>::epsilon() * kmax;
            const double budget = std::max(tau, noise) * std::abs(h);
            if (err <= budget || std::abs(h) <= h_floor) {
                // accept
                t = t_end;
                y.swap(ynew);
                k1.swap(k7);  // FSAL
                for (int i = 0; i < n; ++i) {
                    const double yi = y[static_cast<size_t>(i)];
                    if (std::abs(yi) > opt.y_cap)
                        throw BlowUpError(t, res.support[static_cast<size_t>(i)]);
                    res.est_error = std::hypot(res.est_error,
                                               std::exp(yi) * yerr[static_cast<size_t>(i)]);
                }
                res.steps += 1;
                if (landing) {
                    h = h_proposed;  // do not let a short remainder throttle the next segment
                } else {
                    const double grow = (err > 0.0)
                        ? std::min(5.0, std::max(0.2, 0.9 * std::pow(budget / err, 0.25)))
                        : 5.0;
                    h *= grow;
                }
            } else {
                have_k1 = true;  // k1 still valid at unchanged t
                h *= std::max(0.2, 0.9 * std::pow(budget / err, 0.25));
            }
        }
        have_k1 = false;  // crossing a lattice point: re-evaluate on the new side
    }

    for (int i = 0; i < n; ++i)
        res.x[static_cast<size_t>(res.support[static_cast<size_t>(i)])] =
            std::exp(y[static_cast<size_t>(i)]);
    res.t1 = t1;
    return res;
}

FlowResult flow(const SystemSpec& spec, double t0, double t1, const Vec& x0, double tol) {
    FlowOptions opt;
    opt.tol = tol;
    return flow(spec, t0, t1, x0, opt);
}

std::vector<FlowResult> flow_trajectory(const SystemSpec& spec, double t0,
                                        const std::vector<double>& sample_times,
                                        const Vec& x0, double tol) {
    std::vector<FlowResult> out;
    out.reserve(sample_times.size());
    double t = t0;
    Vec x = x0;
    double acc_err = 0.0;
    long acc_steps = 0;
    for (double ts : sample_times) {
        if (ts < t0) throw InputError("sample times must be >= t0");
        if (ts < t) throw InputError("sample times must be nondecreasing");
        FlowResult r = flow(spec, t, ts, x, tol);
        acc_err = std::hypot(acc_err, r.est_error);
        acc_steps += r.steps;
        r.t0 = t0;
        r.est_error = acc_err;
        r.steps = acc_steps;
        t = ts;
        x = r.x;
        out.push_back(std::move(r));
    }
    return out;
}

std::pair<TorusPoint, Vec> extended_flow(const SystemSpec& spec, double t,
                                         TorusPoint s, const Vec& x, double tol) {
    if (t < 0.0) throw InputError("extended flow requires t >= 0");
    const TorusPoint s1 = torus_point(s.s + t, spec.period());
    if (t == 0.0) return {s1, x};
    FlowResult r = flow(spec, s.s, s.s + t, x, tol);
    return {s1, std::move(r.x)};
}

}  // namespace csimplex
