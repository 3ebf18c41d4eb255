#include "csimplex/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>

namespace csimplex {

namespace {

std::uint64_t encode_k(const std::vector<int>& k, int m) {
    std::uint64_t key = 0;
    for (int v : k) key = key * static_cast<std::uint64_t>(m + 1) + static_cast<std::uint64_t>(v);
    return key;
}

double binomial(int n, int r) {
    double v = 1.0;
    for (int i = 1; i <= r; ++i) v = v * (n - r + i) / i;
    return v;
}

// Solve the (n x n) linear system in place by Gaussian elimination.
bool solve_dense(std::vector<Vec>& A, Vec& b) {
    const int n = static_cast<int>(b.size());
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(A[static_cast<size_t>(r)][static_cast<size_t>(col)]) >
                std::abs(A[static_cast<size_t>(piv)][static_cast<size_t>(col)]))
                piv = r;
        if (A[static_cast<size_t>(piv)][static_cast<size_t>(col)] == 0.0) return false;
        std::swap(A[static_cast<size_t>(piv)], A[static_cast<size_t>(col)]);
        std::swap(b[static_cast<size_t>(piv)], b[static_cast<size_t>(col)]);
        const double inv = 1.0 / A[static_cast<size_t>(col)][static_cast<size_t>(col)];
        for (int r = col + 1; r < n; ++r) {
            const double f = A[static_cast<size_t>(r)][static_cast<size_t>(col)] * inv;
            if (f == 0.0) continue;
            for (int c = col; c < n; ++c)
                A[static_cast<size_t>(r)][static_cast<size_t>(c)] -=
                    f * A[static_cast<size_t>(col)][static_cast<size_t>(c)];
            b[static_cast<size_t>(r)] -= f * b[static_cast<size_t>(col)];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        double s = b[static_cast<size_t>(r)];
        for (int c = r + 1; c < n; ++c)
            s -= A[static_cast<size_t>(r)][static_cast<size_t>(c)] * b[static_cast<size_t>(c)];
        b[static_cast<size_t>(r)] = s / A[static_cast<size_t>(r)][static_cast<size_t>(r)];
    }
    return true;
}

void enumerate_nodes(int d, int m, std::vector<int>& k, int pos, int left,
                     std::vector<std::vector<int>>& out) {
    if (pos == d - 1) {
        k[static_cast<size_t>(pos)] = left;
        out.push_back(k);
        return;
    }
    for (int v = left; v >= 0; --v) {
        k[static_cast<size_t>(pos)] = v;
        enumerate_nodes(d, m, k, pos + 1, left - v, out);
    }
}

}  // namespace

int DirectionGrid::node_index(const std::vector<int>& k) const {
    const auto it = index_.find(encode_k(k, m));
    return it == index_.end() ? -1 : it->second;
}

std::shared_ptr<const DirectionGrid> direction_grid(int d, int m) {
    if (d < 1 || m < 1) throw InputError("direction grid requires d >= 1 and m >= 1");
    const double count = binomial(m + d - 1, d - 1);
    if (count > 2e8) throw InputError("direction grid node count overflows the supported range");

    auto grid = std::make_shared<DirectionGrid>();
    grid->d = d;
    grid->m = m;

    std::vector<int> k(static_cast<size_t>(d), 0);
    enumerate_nodes(d, m, k, 0, m, grid->node_k);
    for (size_t i = 0; i < grid->node_k.size(); ++i)
        grid->index_[encode_k(grid->node_k[i], m)] = static_cast<int>(i);
    for (const auto& kk : grid->node_k) {
        Vec u(static_cast<size_t>(d));
        for (int i = 0; i < d; ++i) u[static_cast<size_t>(i)] = static_cast<double>(kk[static_cast<size_t>(i)]) / m;
        grid->nodes.push_back(std::move(u));
    }

    if (d == 1) {
        grid->simplices.push_back({0});
        return grid;
    }

    // Staircase (Kuhn) triangulation in y-space, y_j = sum_{i>=j} k_i for
    // j = 1..d-1; the admissible region is m >= y_1 >= ... >= y_{d-1} >= 0.
    const int D = d - 1;
    std::vector<int> perm(static_cast<size_t>(D));
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> base(static_cast<size_t>(D), 0);

    const auto y_to_index = [&](const std::vector<int>& y) {
        std::vector<int> kk(static_cast<size_t>(d));
        for (int j = 0; j < D - 1; ++j)
            kk[static_cast<size_t>(j)] = y[static_cast<size_t>(j)] - y[static_cast<size_t>(j) + 1];
        kk[static_cast<size_t>(D - 1)] = y[static_cast<size_t>(D - 1)];
        kk[static_cast<size_t>(d - 1)] = m - y[0];
        return grid->node_index(kk);
    };
    const auto y_admissible = [&](const std::vector<int>& y) {
        if (y[0] > m || y[static_cast<size_t>(D - 1)] < 0) return false;
        for (int j = 0; j + 1 < D; ++j)
            if (y[static_cast<size_t>(j)] < y[static_cast<size_t>(j) + 1]) return false;
        return true;
    };

    std::vector<std::vector<int>> bases;
    std::vector<int> cur(static_cast<size_t>(D), 0);
    // all base corners in [0, m-1]^D
    while (true) {
        bases.push_back(cur);
        int pos = D - 1;
        while (pos >= 0 && ++cur[static_cast<size_t>(pos)] == m) {
            cur[static_cast<size_t>(pos)] = 0;
            --pos;
        }
        if (pos < 0) break;
    }

    std::sort(perm.begin(), perm.end());
    do {
        for (const auto& a : bases) {
            std::vector<int> y = a;
            std::vector<int> cell;
            bool ok = y_admissible(y);
            if (ok) cell.push_back(y_to_index(y));
            for (int j = 0; ok && j < D; ++j) {
                y[static_cast<size_t>(perm[static_cast<size_t>(j)])] += 1;
                ok = y_admissible(y);
                if (ok) cell.push_back(y_to_index(y));
            }
            if (ok) grid->simplices.push_back(std::move(cell));
        }
    } while (std::next_permutation(perm.begin(), perm.end()));

    double expected = 1.0;
    for (int j = 0; j < D; ++j) expected *= m;
    if (static_cast<double>(grid->simplices.size()) != expected)
        throw NumericalError("staircase triangulation cell count mismatch");
    return grid;
}

Vec RadialMesh::point(int node) const {
    Vec p = grid->nodes[static_cast<size_t>(node)];
    for (auto& v : p) v *= R[static_cast<size_t>(node)];
    return p;
}

std::vector<Vec> RadialMesh::represented_points() const {
    std::vector<Vec> pts;
    pts.reserve(R.size());
    for (size_t i = 0; i < R.size(); ++i) pts.push_back(point(static_cast<int>(i)));
    return pts;
}

RadialMesh lower_mesh_init(std::shared_ptr<const DirectionGrid> grid, double eps) {
    if (!(eps > 0.0)) throw InputError("epsilon must be positive");
    RadialMesh mesh;
    mesh.grid = std::move(grid);
    mesh.R.assign(mesh.grid->nodes.size(), eps);
    mesh.kind = MeshKind::lower;
    return mesh;
}

RadialMesh upper_mesh_init(std::shared_ptr<const DirectionGrid> grid, double kappa) {
    if (kappa < 0.0) throw InputError("kappa must be nonnegative");
    RadialMesh mesh;
    mesh.grid = std::move(grid);
    mesh.kind = MeshKind::upper;
    mesh.R.reserve(mesh.grid->nodes.size());
    // the ray through u meets {exists j: x_j = 1+kappa} at R = (1+kappa)/max_i u_i
    for (const auto& u : mesh.grid->nodes) {
        const double umax = *std::max_element(u.begin(), u.end());
        mesh.R.push_back((1.0 + kappa) / umax);
    }
    return mesh;
}

Vec simplex_chart(const Vec& u) {
    return Vec(u.begin(), u.end() - 1);
}

Located locate_in_mesh(const std::vector<Vec>& chart_pts,
                       const std::vector<std::vector<int>>& simplices, const Vec& q,
                       double fold_tol) {
    const size_t D = q.size();

    // vertex snap (keeps axis/vertex values exact through resampling)
    for (size_t j = 0; j < chart_pts.size(); ++j) {
        double diff = 0.0;
        for (size_t c = 0; c < D; ++c) diff = std::max(diff, std::abs(chart_pts[j][c] - q[c]));
        if (diff <= 1e-14) {
            Located loc;
            loc.vertices = {static_cast<int>(j)};
            loc.lambda = {1.0};
            loc.worst_lambda = 1.0;
            return loc;
        }
    }

    Located best;
    best.worst_lambda = -std::numeric_limits<double>::infinity();
    Vec lambda(D + 1);
    for (size_t si = 0; si < simplices.size(); ++si) {
        const auto& sx = simplices[si];
        if (D == 0) {  // one-species degenerate chart
            Located loc;
            loc.vertices = sx;
            loc.lambda = {1.0};
            loc.simplex = static_cast<int>(si);
            loc.worst_lambda = 1.0;
            return loc;
        }
        const Vec& p0 = chart_pts[static_cast<size_t>(sx[0])];
        std::vector<Vec> A(D, Vec(D));
        Vec b(D);
        for (size_t c = 0; c < D; ++c) {
            for (size_t v = 0; v < D; ++v)
                A[c][v] = chart_pts[static_cast<size_t>(sx[v + 1])][c] - p0[c];
            b[c] = q[c] - p0[c];
        }
        if (!solve_dense(A, b)) continue;  // degenerate cell
        double l0 = 1.0;
        double worst = std::numeric_limits<double>::infinity();
        for (size_t v = 0; v < D; ++v) {
            lambda[v + 1] = b[v];
            l0 -= b[v];
            worst = std::min(worst, b[v]);
        }
        lambda[0] = l0;
        worst = std::min(worst, l0);
        if (worst > best.worst_lambda) {
            best.worst_lambda = worst;
            best.simplex = static_cast<int>(si);
            best.vertices = sx;
            best.lambda.assign(lambda.begin(), lambda.end());
            if (worst >= -1e-12) break;  // genuinely contained; stop scanning
        }
    }

    if (best.simplex < 0 || best.worst_lambda < -fold_tol)
        throw MeshFoldError("query direction not covered by the mesh (worst weight " +
                            std::to_string(best.worst_lambda) + ")");
    // clamp boundary roundoff
    double sum = 0.0;
    for (auto& l : best.lambda) {
        if (l < 0.0) l = 0.0;
        sum += l;
    }
    for (auto& l : best.lambda) l /= sum;
    return best;
}

double interp_radius(const RadialMesh& mesh, const Vec& u) {
    std::vector<Vec> chart;
    chart.reserve(mesh.grid->nodes.size());
    for (const auto& n : mesh.grid->nodes) chart.push_back(simplex_chart(n));
    const Located loc = locate_in_mesh(chart, mesh.grid->simplices, simplex_chart(u));
    double r = 0.0;
    for (size_t v = 0; v < loc.vertices.size(); ++v)
        r += loc.lambda[v] * mesh.R[static_cast<size_t>(loc.vertices[v])];
    return r;
}

double point_to_simplex_distance(const Vec& q, const std::vector<Vec>& verts) {
    const size_t n = verts.size();
    const size_t dim = q.size();
    double best = std::numeric_limits<double>::infinity();

    // enumerate faces (nonempty vertex subsets), project onto each affine hull
    for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
        std::vector<int> idx;
        for (size_t v = 0; v < n; ++v)
            if (mask & (1u << v)) idx.push_back(static_cast<int>(v));
        const size_t k = idx.size();

        if (k == 1) {
            best = std::min(best, std::sqrt(dist2(q, verts[static_cast<size_t>(idx[0])])));
            continue;
        }
        // least squares for beta in span{p_i - p_0}
        const Vec& p0 = verts[static_cast<size_t>(idx[0])];
        std::vector<Vec> E;  // edge vectors
        for (size_t v = 1; v < k; ++v) E.push_back(sub(verts[static_cast<size_t>(idx[v])], p0));
        std::vector<Vec> G(k - 1, Vec(k - 1));
        Vec rhs(k - 1);
        const Vec qp = sub(q, p0);
        for (size_t a = 0; a < k - 1; ++a) {
            for (size_t b2 = 0; b2 < k - 1; ++b2) {
                double s = 0.0;
                for (size_t c = 0; c < dim; ++c) s += E[a][c] * E[b2][c];
                G[a][b2] = s;
            }
            double s = 0.0;
            for (size_t c = 0; c < dim; ++c) s += E[a][c] * qp[c];
            rhs[a] = s;
        }
        if (!solve_dense(G, rhs)) continue;
        double l0 = 1.0;
        bool feasible = true;
        for (double beta : rhs) {
            l0 -= beta;
            if (beta < -1e-12) feasible = false;
        }
        if (l0 < -1e-12) feasible = false;
        if (!feasible) continue;
        Vec proj = p0;
        for (size_t v = 0; v < k - 1; ++v)
            for (size_t c = 0; c < dim; ++c) proj[c] += rhs[v] * E[v][c];
        best = std::min(best, std::sqrt(dist2(q, proj)));
    }
    return best;
}

double point_to_mesh_distance(const Vec& x, const RadialMesh& mesh) {
    const int d = mesh.grid->d;
    const int m = mesh.grid->m;

    // near-surface queries in the planar case: only segments around the query
    // direction can realize the minimum (radial graph with bounded slope)
    if (d == 2) {
        const double n1 = norm1(x);
        if (n1 > 0.0) {
            const double u1 = x[0] / n1;
            const int i0 = std::clamp(static_cast<int>(std::lround((1.0 - u1) * m)), 0, m);
            const double Rloc = mesh.R[static_cast<size_t>(i0)];
            const double h = 1.0 / m;
            if (std::abs(n1 - Rloc) <= 2.0 * h * Rloc + 1e-12) {
                double best = std::numeric_limits<double>::infinity();
                std::vector<Vec> seg(2);
                for (int j = std::max(0, i0 - 32); j < std::min(m, i0 + 32); ++j) {
                    seg[0] = mesh.point(j);
                    seg[1] = mesh.point(j + 1);
                    best = std::min(best, point_to_simplex_distance(x, seg));
                }
                return best;
            }
        }
    }

    double best = std::numeric_limits<double>::infinity();
    std::vector<Vec> verts;
    for (const auto& sx : mesh.grid->simplices) {
        verts.clear();
        for (int v : sx) verts.push_back(mesh.point(v));
        best = std::min(best, point_to_simplex_distance(x, verts));
    }
    return best;
}

double hausdorff(const std::vector<Vec>& A, const std::vector<Vec>& B) {
    if (A.empty() || B.empty()) throw InputError("hausdorff requires nonempty sets");
    const auto directed = [](const std::vector<Vec>& X, const std::vector<Vec>& Y) {
        double cmax = 0.0;
        for (const auto& x : X) {
            double cmin = std::numeric_limits<double>::infinity();
            for (const auto& y : Y) {
                const double d2 = dist2(x, y);
                if (d2 < cmin) {
                    cmin = d2;
                    if (cmin <= cmax) break;  // cannot raise the max
                }
            }
            if (cmin > cmax) cmax = cmin;
        }
        return cmax;
    };
    return std::sqrt(std::max(directed(A, B), directed(B, A)));
}

Membership gamma_membership(const RadialMesh& mesh, const Vec& x, double tol) {
    for (double v : x)
        if (v < 0.0 || !std::isfinite(v)) throw InputError("query point must be in the orthant");
    const double n1 = norm1(x);
    Membership out;
    if (n1 == 0.0) {
        out.region = Region::inside;
        out.margin = -*std::min_element(mesh.R.begin(), mesh.R.end());
        return out;
    }
    Vec u(x.size());
    for (size_t i = 0; i < x.size(); ++i) u[i] = x[i] / n1;
    const double r = interp_radius(mesh, u);
    out.margin = n1 - r;
    if (out.margin > tol) out.region = Region::outside;
    else if (out.margin < -tol) out.region = Region::inside;
    else out.region = Region::boundary;
    return out;
}

}  // namespace csimplex
