#ifndef CSIMPLEX_FLOW_HPP
#define CSIMPLEX_FLOW_HPP

#include <vector>

#include "csimplex/system.hpp"
#include "csimplex/types.hpp"

namespace csimplex {

/// Value of the process together with accuracy metadata and support-face
/// bookkeeping.  Components outside `support` are exactly zero.
struct FlowResult {
    Vec x;
    double t0 = 0.0;
    double t1 = 0.0;
    double est_error = 0.0;   // accumulated local-error estimate, state units
    std::vector<int> support; // indices i with x_i > 0, inherited from the input
    long steps = 0;           // accepted integrator steps
};

/// Canonical representative of a point on the time torus [0,T] mod T.
struct TorusPoint {
    double s = 0.0;
};

TorusPoint torus_point(double t, double T);
double torus_distance(TorusPoint a, TorusPoint b, double T);

struct FlowOptions {
    double tol = 1e-10;   // accuracy knob: target global error over one period
    double y_cap = 700.0; // blow-up cap on |ln x_i|
    long max_steps = 50'000'000;
};

/// Integrate the process from (t0, x0) to t1.  Forward time always succeeds
/// (global forward existence under the standing hypotheses); backward time
/// runs the sign-reversed system and may legitimately blow up off the
/// attractor, reported as BlowUpError.  Integration is carried out in log
/// coordinates on the strictly positive support face, so positivity and face
/// invariance hold structurally, and every internal step lands exactly on the
/// breakpoint lattice {tau_k + n T}.
FlowResult flow(const SystemSpec& spec, double t0, double t1, const Vec& x0,
                double tol = 1e-10);
FlowResult flow(const SystemSpec& spec, double t0, double t1, const Vec& x0,
                const FlowOptions& opt);

/// Dense output at the given nondecreasing sample times (all >= t0), chained
/// from one integration pass.
std::vector<FlowResult> flow_trajectory(const SystemSpec& spec, double t0,
                                        const std::vector<double>& sample_times,
                                        const Vec& x0, double tol = 1e-10);

/// Skew-product flow on the time torus: (s, x) -> (s + t mod T, Phi(s'+t; s', x)).
std::pair<TorusPoint, Vec> extended_flow(const SystemSpec& spec, double t,
                                         TorusPoint s, const Vec& x,
                                         double tol = 1e-10);

std::vector<int> support_of(const Vec& x);

}  // namespace csimplex

#endif
