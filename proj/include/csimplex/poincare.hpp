#ifndef CSIMPLEX_POINCARE_HPP
#define CSIMPLEX_POINCARE_HPP

#include <utility>
#include <vector>

#include "csimplex/flow.hpp"
#include "csimplex/system.hpp"
#include "csimplex/types.hpp"

namespace csimplex {

/// P(x) = Phi(T; 0, x).  Support-preserving.
Vec poincare_map(const SystemSpec& spec, const Vec& x, double tol = 1e-10);

/// P^n by n successive period maps (bounds drift versus one long sweep).
Vec poincare_iter(const SystemSpec& spec, const Vec& x, int n, double tol = 1e-10);

/// Kolmogorov factor f_i(x) = exp( int_0^T g_i(tau, Phi(tau;0,x)) dtau ),
/// computed by composite Gauss-Legendre quadrature along the trajectory.
/// Defined by the same integral also where x_i = 0.
Vec fitness(const SystemSpec& spec, const Vec& x, double tol = 1e-10);

/// One-species period map H_i(x) = phi_i(T; 0, x) on the i-th axis.
double axis_map(const SystemSpec& spec, int i, double x, double tol = 1e-10);

struct AxisProfile {
    int i = 0;
    double xhat = 0.0;       // fixed point of the axis period map
    std::vector<std::pair<double, double>> psi;  // sampled T-periodic axis orbit
    int iterations = 0;      // monotone iteration + bisection count
    double residual = 0.0;   // |H_i(xhat) - xhat|
};

struct AxisSolveOptions {
    double tol = 1e-12;       // bisection width on the fixed point
    double flow_tol = 1e-10;
    double M_search = 1024.0; // doubling-search cap for H_i(M) <= M
    int max_monotone = 10'000;
    int psi_samples = 33;
};

/// Unique positive fixed point of the axis map: doubling search for a point
/// with H_i(M) <= M, monotone iteration downward, then bisection.
AxisProfile axis_fixed_point(const SystemSpec& spec, int i, const AxisSolveOptions& opt = {});

std::vector<AxisProfile> compute_all_axis_profiles(const SystemSpec& spec,
                                                   const AxisSolveOptions& opt = {});

/// Axis profiles + rescaling so every axis fixed point is 1.
std::pair<SystemSpec, std::vector<AxisProfile>> normalized_system(
    const SystemSpec& spec, const AxisSolveOptions& opt = {});

}  // namespace csimplex

#endif
