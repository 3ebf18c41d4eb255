#include "csimplex/simplex.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <thread>

namespace csimplex {

namespace {

void parallel_for(int n, int threads, const std::function<void(int)>& body) {
    if (threads <= 1 || n < 4) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    std::atomic<int> next{0};
    const int nt = std::min(threads, n);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&]() {
            for (int i = next.fetch_add(1); i < n; i = next.fetch_add(1)) body(i);
        });
    for (auto& th : pool) th.join();
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (size_t i = 0; i < a.size(); ++i) s = std::max(s, std::abs(a[i] - b[i]));
    return s;
}

}  // namespace

RadialMesh push_forward_resample(const SystemSpec& spec, const RadialMesh& mesh,
                                 double t0, double t1, double tol, int threads) {
    if (t1 < t0) throw InputError("push forward requires t1 >= t0");
    const auto& grid = *mesh.grid;
    const int n = static_cast<int>(grid.nodes.size());

    // flow all node points; node flows are independent
    std::vector<Vec> image_dir(static_cast<size_t>(n));
    std::vector<double> image_rho(static_cast<size_t>(n));
    std::exception_ptr failure;
    std::mutex failure_mu;
    parallel_for(n, threads, [&](int i) {
        try {
            Vec p = mesh.point(i);
            const Vec y = flow(spec, t0, t1, p, tol).x;
            const double rho = norm1(y);
            if (!(rho > 0.0) || !std::isfinite(rho))
                throw NumericalError("pushed mesh point lost positivity");
            Vec u(y.size());
            for (size_t c = 0; c < y.size(); ++c) u[c] = y[c] / rho;
            image_dir[static_cast<size_t>(i)] = std::move(u);
            image_rho[static_cast<size_t>(i)] = rho;
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mu);
            if (!failure) failure = std::current_exception();
        }
    });
    if (failure) std::rethrow_exception(failure);

    // interpolate image radii back onto the lattice directions
    RadialMesh out;
    out.grid = mesh.grid;
    out.kind = mesh.kind;
    out.s = torus_point(t1, spec.period());
    out.R.assign(static_cast<size_t>(n), 0.0);

    if (grid.d == 2) {
        // 1-D resample: nodes are ordered by descending u1 and the weakly
        // retrotone dynamics keeps the image directions ordered the same way;
        // integration roundoff can still perturb near-equal neighbours, so sort
        std::vector<int> order(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i) order[static_cast<size_t>(i)] = i;
        std::sort(order.begin(), order.end(), [&](int a, int b) {
            return image_dir[static_cast<size_t>(a)][0] > image_dir[static_cast<size_t>(b)][0];
        });
        for (int i = 0; i < n; ++i) {
            const double q = grid.nodes[static_cast<size_t>(i)][0];
            int lo = 0, hi = n - 1;  // image u1 descending: find bracket [hi_val, lo_val]
            while (hi - lo > 1) {
                const int mid = (lo + hi) / 2;
                if (image_dir[static_cast<size_t>(order[static_cast<size_t>(mid)])][0] >= q) lo = mid;
                else hi = mid;
            }
            const int ja = order[static_cast<size_t>(lo)], jb = order[static_cast<size_t>(hi)];
            const double ua = image_dir[static_cast<size_t>(ja)][0];
            const double ub = image_dir[static_cast<size_t>(jb)][0];
            double lambda;
            if (std::abs(ua - q) <= 1e-14) lambda = 1.0;       // vertex snap
            else if (std::abs(ub - q) <= 1e-14) lambda = 0.0;
            else if (!(ua - ub > 0.0)) {
                throw MeshFoldError("degenerate image segment in the pushed mesh");
            } else {
                lambda = (q - ub) / (ua - ub);
                if (lambda < -1e-6 / (ua - ub) || lambda > 1.0 + 1e-6 / (ua - ub))
                    throw MeshFoldError("query direction not covered by the image mesh");
                lambda = std::clamp(lambda, 0.0, 1.0);
            }
            out.R[static_cast<size_t>(i)] = lambda * image_rho[static_cast<size_t>(ja)] +
                                            (1.0 - lambda) * image_rho[static_cast<size_t>(jb)];
        }
    } else {
        std::vector<Vec> chart(static_cast<size_t>(n));
        for (int i = 0; i < n; ++i)
            chart[static_cast<size_t>(i)] = simplex_chart(image_dir[static_cast<size_t>(i)]);
        parallel_for(n, threads, [&](int i) {
            try {
                const Located loc = locate_in_mesh(chart, grid.simplices,
                                                   simplex_chart(grid.nodes[static_cast<size_t>(i)]));
                double r = 0.0;
                for (size_t v = 0; v < loc.vertices.size(); ++v)
                    r += loc.lambda[v] * image_rho[static_cast<size_t>(loc.vertices[v])];
                out.R[static_cast<size_t>(i)] = r;
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mu);
                if (!failure) failure = std::current_exception();
            }
        });
        if (failure) std::rethrow_exception(failure);
    }

    for (double r : out.R)
        if (!(r > 0.0) || !std::isfinite(r))
            throw NumericalError("resampled radial value not positive");
    return out;
}

SigmaResult construct_sigma(const SystemSpec& spec,
                            std::shared_ptr<const DirectionGrid> grid,
                            const SigmaOptions& opt) {
    if (grid->d != spec.dim()) throw InputError("grid dimension must match the system");
    if (!(opt.kappa > 0.0)) throw InputError("construction requires kappa > 0");
    if (!(opt.epsilon > 0.0) || !(opt.tol > 0.0)) throw InputError("epsilon and tol must be positive");
    const double T = spec.period();

    SigmaResult res;
    res.epsilon_used = opt.epsilon;

    // seed the lower mesh; every radial value must grow over the first period
    RadialMesh lower;
    while (true) {
        lower = lower_mesh_init(grid, res.epsilon_used);
        RadialMesh pushed = push_forward_resample(spec, lower, 0.0, T, opt.flow_tol, opt.threads);
        bool grew = true;
        for (size_t i = 0; i < lower.R.size(); ++i)
            if (pushed.R[i] <= lower.R[i]) {
                grew = false;
                break;
            }
        if (grew) {
            lower = std::move(pushed);
            break;
        }
        res.epsilon_used *= 0.5;
        if (res.epsilon_used < 1e-6)
            throw NumericalError(
                "no epsilon >= 1e-6 makes the seed simplex expand; origin repulsion (H2) "
                "may fail for this system");
    }

    RadialMesh upper = upper_mesh_init(grid, opt.kappa);

    std::vector<double> prev_lower = lower.R, prev_upper = upper.R;
    for (int it = 1; it <= opt.max_iters; ++it) {
        lower = push_forward_resample(spec, lower, 0.0, T, opt.flow_tol, opt.threads);
        upper = push_forward_resample(spec, upper, 0.0, T, opt.flow_tol, opt.threads);

        GapRecord rec;
        rec.iter = it;
        rec.delta_lower = sup_abs_diff(lower.R, prev_lower);
        rec.delta_upper = sup_abs_diff(upper.R, prev_upper);
        double gap = -std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < lower.R.size(); ++i) gap = std::max(gap, upper.R[i] - lower.R[i]);
        rec.gap = gap;
        res.history.push_back(rec);
        res.iterations = it;
        res.final_gap = gap;

        prev_lower = lower.R;
        prev_upper = upper.R;

        if (std::max({rec.delta_lower, rec.delta_upper, rec.gap}) < opt.tol) {
            res.converged = true;
            break;
        }
    }

    res.sigma0.grid = grid;
    res.sigma0.s = TorusPoint{0.0};
    res.sigma0.kind = res.converged ? MeshKind::converged : MeshKind::lower;
    res.sigma0.R.resize(lower.R.size());
    for (size_t i = 0; i < lower.R.size(); ++i)
        res.sigma0.R[i] = 0.5 * (lower.R[i] + upper.R[i]);
    res.lower = std::move(lower);
    res.upper = std::move(upper);
    return res;
}

RadialMesh section(const SystemSpec& spec, const RadialMesh& sigma0, TorusPoint s,
                   double tol, int threads) {
    if (sigma0.kind != MeshKind::converged)
        throw InputError("section requires a converged Sigma_0 mesh");
    if (s.s == 0.0) return sigma0;
    RadialMesh out = push_forward_resample(spec, sigma0, 0.0, s.s, tol, threads);
    out.kind = MeshKind::converged;
    out.s = torus_point(s.s, spec.period());
    return out;
}

SectionFamily section_family(const SystemSpec& spec, const RadialMesh& sigma0,
                             int n_sections, double tol, int threads) {
    if (n_sections < 1) throw InputError("n_sections must be >= 1");
    const double T = spec.period();

    SectionFamily fam;
    fam.meshes.push_back(sigma0);
    fam.s_grid.push_back(0.0);
    for (int k = 1; k < n_sections; ++k) {
        const double s = T * k / n_sections;
        // push Sigma_0 directly to s; chaining sections would accumulate
        // resampling bias linearly in k
        RadialMesh next = push_forward_resample(spec, sigma0, 0.0, s, tol, threads);
        next.kind = MeshKind::converged;
        fam.meshes.push_back(std::move(next));
        fam.s_grid.push_back(s);
    }

    // wrap-around: last section pushed to T must reproduce Sigma_0
    RadialMesh wrapped = push_forward_resample(spec, fam.meshes.back(), fam.s_grid.back(), T,
                                               tol, threads);
    fam.wraparound_error = hausdorff(wrapped.represented_points(), sigma0.represented_points());

    fam.continuity_modulus = 0.0;
    for (int k = 0; k < n_sections; ++k) {
        const auto& a = fam.meshes[static_cast<size_t>(k)].R;
        const auto& b = (k + 1 < n_sections) ? fam.meshes[static_cast<size_t>(k) + 1].R : wrapped.R;
        fam.continuity_modulus = std::max(fam.continuity_modulus, sup_abs_diff(a, b));
    }
    return fam;
}

}  // namespace csimplex
