#ifndef CSIMPLEX_VERIFY_HPP
#define CSIMPLEX_VERIFY_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "csimplex/mesh.hpp"
#include "csimplex/simplex.hpp"
#include "csimplex/system.hpp"

namespace csimplex {

/// Outcome of one executable property check.  A failed check always carries a
/// witness concrete enough to re-run in isolation.
struct VerificationReport {
    std::string check;
    bool passed = false;
    bool inconclusive = false;
    double worst_margin = 0.0;
    std::map<std::string, double> witness;
    std::map<std::string, double> budget;
    std::string note;
};

enum class OrderMode { weak, strict };

/// weak: no strongly ordered pair (x_i + tol < y_i for all i) among the
/// represented points; strict: additionally no ordered pair (x <= y + tol*e
/// with some x_j + tol < y_j) among distinct points.
VerificationReport check_unordered(const RadialMesh& mesh, OrderMode mode, double tol);
VerificationReport check_unordered_points(const std::vector<Vec>& pts, OrderMode mode,
                                          double tol);

/// Sample pairs in [box_lo, box_hi]^d, keep those with P(x) < P(y) beyond tol,
/// and check that the order pulls back: x < y, componentwise strict where the
/// image is strictly ordered.
VerificationReport check_retrotone(const SystemSpec& spec, int n_pairs, const Vec& box_lo,
                                   const Vec& box_hi, double tol, std::uint64_t seed);

/// Random nonzero starts must approach the matching section Sigma_{t mod T}:
/// distance below tol for all t >= horizon*T/2 at the section sampling times,
/// with non-increasing tail distances up to mono_tol.
VerificationReport check_attraction(const SystemSpec& spec, const SectionFamily& family,
                                    int n_starts, int horizon_periods, double tol,
                                    double mono_tol, std::uint64_t seed,
                                    double flow_tol = 1e-10);

/// Backward orbits of interior points contract toward the origin; points on
/// the simplex stay near the section family; outside starts escape.
VerificationReport check_origin_repeller(const SystemSpec& spec, const SectionFamily& family,
                                         int n_starts, double tol, std::uint64_t seed,
                                         double flow_tol = 1e-10);

/// Best-effort asymptotic-phase partner: the Sigma_0 mesh point minimizing the
/// terminal iterate distance, then a decay check along the continuous flow.
VerificationReport check_asymptotic_phase(const SystemSpec& spec, const Vec& x,
                                          const RadialMesh& sigma0, int horizon_periods,
                                          double tol, double flow_tol = 1e-10);

/// ||x - y|| <= sqrt(1+d) ||Pi x - Pi y|| + tol over all node pairs.
VerificationReport check_lipschitz_projection(const RadialMesh& mesh, double tol = 1e-9);

/// Commutation of flow and orthogonal projection on the section family:
/// reconstruct x from Pi x by interpolation over the projected mesh, flow both
/// and compare projections.
VerificationReport check_conjugacy(const SystemSpec& spec, const SectionFamily& family,
                                   int n_samples, double t_step, double tol,
                                   std::uint64_t seed, double flow_tol = 1e-10);

}  // namespace csimplex

#endif
