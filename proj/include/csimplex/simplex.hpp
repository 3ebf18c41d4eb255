#ifndef CSIMPLEX_SIMPLEX_HPP
#define CSIMPLEX_SIMPLEX_HPP

#include <memory>
#include <vector>

#include "csimplex/mesh.hpp"
#include "csimplex/system.hpp"

namespace csimplex {

/// Flow every represented point of the mesh from t0 to t1, read off the image
/// directions and l1-norms, and re-interpolate the norms back onto the
/// original grid nodes (piecewise-linear over the image triangulation in
/// direction coordinates).  Output carries s = t1 mod T.
RadialMesh push_forward_resample(const SystemSpec& spec, const RadialMesh& mesh,
                                 double t0, double t1, double tol = 1e-10,
                                 int threads = 1);

struct GapRecord {
    int iter = 0;
    double gap = 0.0;          // sup (R_upper - R_lower)
    double delta_lower = 0.0;  // sup |R_lower changed this iteration|
    double delta_upper = 0.0;
};

struct SigmaResult {
    RadialMesh sigma0;         // midpoint of the converged brackets
    RadialMesh lower, upper;   // final bracket meshes
    bool converged = false;
    int iterations = 0;
    double final_gap = 0.0;
    double epsilon_used = 0.0;
    std::vector<GapRecord> history;
};

struct SigmaOptions {
    double epsilon = 0.1;
    double kappa = 0.1;
    double tol = 1e-6;        // convergence metric: sup-norm of radial changes/gap
    int max_iters = 200;
    double flow_tol = 1e-10;
    int threads = 1;
};

/// Alternate one-period advances of the lower mesh (from eps*Delta) and the
/// upper mesh (from the box face H) until sup|dR_lower|, sup|dR_upper| and
/// sup(R_upper - R_lower) all fall below tol.  The lower seed must expand
/// radially after one period; otherwise eps is halved (floor 1e-6).
SigmaResult construct_sigma(const SystemSpec& spec,
                            std::shared_ptr<const DirectionGrid> grid,
                            const SigmaOptions& opt = {});

/// Section at torus time s: push Sigma_0 forward from 0 to the representative
/// of s.
RadialMesh section(const SystemSpec& spec, const RadialMesh& sigma0, TorusPoint s,
                   double tol = 1e-10, int threads = 1);

/// Sections at s = k T / n_sections with continuity modulus and wrap-around
/// consistency (push of the last section through T versus Sigma_0).
SectionFamily section_family(const SystemSpec& spec, const RadialMesh& sigma0,
                             int n_sections, double tol = 1e-10, int threads = 1);

}  // namespace csimplex

#endif
