#pragma once

#include <functional>
#include <vector>

namespace wardwatt {

struct SimplexOptions {
    int max_iterations = 5000;
    // Per-coordinate size of the initial simplex.
    std::vector<double> initial_step;
    double f_tolerance = 1e-12;
    double x_tolerance = 1e-10;
    int restarts = 2;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Derivative-free Nelder-Mead minimization. The objective may return +inf
// to mark infeasible points; the returned value never exceeds f(start).
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& objective,
                          std::vector<double> start, const SimplexOptions& options);

}  // namespace wardwatt
