#pragma once

#include <functional>
#include <span>
#include <vector>

namespace socdist::optim {

struct SimplexOptions {
    double initial_step = 0.1;  // in normalized [0,1] coordinates
    double restart_step = 0.05;
    double tolerance = 1e-4;    // simplex diameter, normalized coordinates
    int max_evaluations = 2000;
    int restarts = 2;
};

struct SimplexResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    int restarts_used = 0;
    bool converged = false;
};

using Objective = std::function<double(std::span<const double>)>;

/// Nelder-Mead over a box. The search runs in coordinates normalized to [0,1] per axis and
/// trial points are projected onto the box. Non-finite objective values are treated as +inf.
/// After convergence the simplex is rebuilt around the best vertex up to `restarts` times.
SimplexResult minimize_bounded(const Objective& f, std::span<const double> start,
                               std::span<const double> lower, std::span<const double> upper,
                               const SimplexOptions& options = {});

}  // namespace socdist::optim
