#include "wardwatt/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace wardwatt {

namespace {

struct Vertex {
    std::vector<double> x;
    double f;
};

double finite_or_inf(double v) {
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

// One Nelder-Mead descent with standard coefficients.
SimplexResult descend(const std::function<double(const std::vector<double>&)>& objective,
                      const std::vector<double>& start, const SimplexOptions& opt, int budget) {
    const std::size_t n = start.size();
    std::vector<Vertex> simplex;
    simplex.reserve(n + 1);
    simplex.push_back({start, finite_or_inf(objective(start))});
    for (std::size_t i = 0; i < n; ++i) {
        auto x = start;
        x[i] += opt.initial_step.empty() ? 0.1 : opt.initial_step[i];
        simplex.push_back({x, finite_or_inf(objective(x))});
    }

    constexpr double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    SimplexResult res;
    int it = 0;
    for (; it < budget; ++it) {
        std::stable_sort(simplex.begin(), simplex.end(), [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
        const double f_best = simplex.front().f;
        const double f_worst = simplex.back().f;
        double diameter = 0.0;
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                diameter = std::max(diameter, std::abs(simplex[v].x[i] - simplex[0].x[i]));
            }
        }
        if (std::isfinite(f_worst) &&
            std::abs(f_worst - f_best) <= opt.f_tolerance * (std::abs(f_best) + 1e-300) &&
            diameter <= opt.x_tolerance * (1.0 + std::abs(simplex[0].x[0]))) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t v = 0; v < n; ++v)
            for (std::size_t i = 0; i < n; ++i) centroid[i] += simplex[v].x[i] / static_cast<double>(n);

        auto along = [&](double t) {
            std::vector<double> x(n);
            for (std::size_t i = 0; i < n; ++i) x[i] = centroid[i] + t * (simplex[n].x[i] - centroid[i]);
            return x;
        };

        auto xr = along(-alpha);
        const double fr = finite_or_inf(objective(xr));
        if (fr < simplex[0].f) {
            auto xe = along(-alpha * gamma);
            const double fe = finite_or_inf(objective(xe));
            simplex[n] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr < simplex[n - 1].f) {
            simplex[n] = {xr, fr};
            continue;
        }
        const bool outside = fr < simplex[n].f;
        auto xc = along(outside ? -alpha * rho : rho);
        const double fc = finite_or_inf(objective(xc));
        if (fc < std::min(fr, simplex[n].f)) {
            simplex[n] = {xc, fc};
            continue;
        }
        for (std::size_t v = 1; v <= n; ++v) {
            for (std::size_t i = 0; i < n; ++i) {
                simplex[v].x[i] = simplex[0].x[i] + sigma * (simplex[v].x[i] - simplex[0].x[i]);
            }
            simplex[v].f = finite_or_inf(objective(simplex[v].x));
        }
    }
    const auto best = std::min_element(simplex.begin(), simplex.end(),
                                       [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    res.x = best->x;
    res.value = best->f;
    res.iterations = it;
    return res;
}

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options) {
    if (start.empty()) throw std::invalid_argument("nelder_mead: empty start point");
    if (!options.initial_step.empty() && options.initial_step.size() != start.size()) {
        throw std::invalid_argument("nelder_mead: initial_step size mismatch");
    }
    SimplexResult best{start, finite_or_inf(objective(start)), 0, false};
    int used = 0;
    for (int round = 0; round <= options.restarts && used < options.max_iterations; ++round) {
        auto r = descend(objective, best.x, options, options.max_iterations - used);
        used += r.iterations;
        const bool improved = r.value < best.value;
        if (improved) {
            best.x = std::move(r.x);
            best.value = r.value;
        }
        best.converged = r.converged;
        // A restart that does not move the optimum confirms convergence.
        if (round > 0 && !improved) break;
    }
    best.iterations = used;
    return best;
}

}  // namespace wardwatt
