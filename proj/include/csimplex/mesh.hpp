#ifndef CSIMPLEX_MESH_HPP
#define CSIMPLEX_MESH_HPP

#include <cstdint>
#include <map>
#include <memory>
#include <vector>

#include "csimplex/flow.hpp"
#include "csimplex/types.hpp"

namespace csimplex {

/// Barycentric lattice on the standard probability simplex: all u with
/// coordinates k/m (k integers summing to m), triangulated by the staircase
/// (Kuhn) subdivision.  Node count C(m+d-1, d-1); every vertex e_i and every
/// boundary face is included.
struct DirectionGrid {
    int d = 0;
    int m = 0;
    std::vector<Vec> nodes;                   // directions, each sums to 1
    std::vector<std::vector<int>> node_k;     // integer coordinates, sum m
    std::vector<std::vector<int>> simplices;  // d node indices each

    int node_index(const std::vector<int>& k) const;  // -1 when absent

  private:
    std::map<std::uint64_t, int> index_;
    friend std::shared_ptr<const DirectionGrid> direction_grid(int d, int m);
};

std::shared_ptr<const DirectionGrid> direction_grid(int d, int m);

enum class MeshKind { lower, upper, converged };

/// Radial graph {R(u) u : u in grid} over the direction grid at torus time s.
struct RadialMesh {
    std::shared_ptr<const DirectionGrid> grid;
    std::vector<double> R;   // positive radial value per node
    TorusPoint s{0.0};
    MeshKind kind = MeshKind::lower;

    Vec point(int node) const;                 // R(u) * u
    std::vector<Vec> represented_points() const;
};

RadialMesh lower_mesh_init(std::shared_ptr<const DirectionGrid> grid, double eps);
RadialMesh upper_mesh_init(std::shared_ptr<const DirectionGrid> grid, double kappa);

/// Sections of the time-periodic simplex over a torus grid including s = 0.
struct SectionFamily {
    std::vector<double> s_grid;
    std::vector<RadialMesh> meshes;
    double continuity_modulus = 0.0;  // max adjacent sup-norm radial difference
    double wraparound_error = 0.0;    // d_H of (last section pushed to T) vs s=0
};

// ---------------------------------------------------------------- geometry

/// Result of locating a query in a simplicial mesh given by chart coordinates.
struct Located {
    std::vector<int> vertices;     // node indices
    std::vector<double> lambda;    // matching barycentric weights (sum 1)
    int simplex = -1;              // -1 for an exact vertex snap
    double worst_lambda = 0.0;     // min weight before clamping
};

/// Brute-force point location over a (possibly deformed) simplicial mesh.
/// chart_pts are the vertex positions in a (d-1)-dimensional affine chart.
/// Weights down to -fold_tol are clamped; anything worse throws MeshFoldError.
Located locate_in_mesh(const std::vector<Vec>& chart_pts,
                       const std::vector<std::vector<int>>& simplices, const Vec& q,
                       double fold_tol = 1e-6);

/// Chart for the probability simplex: drop the last coordinate.
Vec simplex_chart(const Vec& u);

/// Interpolated radial value at an arbitrary direction u.
double interp_radius(const RadialMesh& mesh, const Vec& u);

/// Euclidean distance from q to the convex hull of the given vertices.
double point_to_simplex_distance(const Vec& q, const std::vector<Vec>& vertices);

/// Distance from x to the piecewise-linear surface represented by the mesh.
double point_to_mesh_distance(const Vec& x, const RadialMesh& mesh);

/// Hausdorff distance between finite point sets (exact; early-break loops).
double hausdorff(const std::vector<Vec>& A, const std::vector<Vec>& B);

enum class Region { inside, boundary, outside };

struct Membership {
    Region region = Region::inside;
    double margin = 0.0;  // |x|_1 - R(u), signed (negative inside)
};

/// Classify x against the order-convex region under the mesh: radial compare
/// of |x|_1 with the interpolated R at direction x/|x|_1.  x = 0 is inside.
Membership gamma_membership(const RadialMesh& mesh, const Vec& x, double tol = 1e-9);

}  // namespace csimplex

#endif
