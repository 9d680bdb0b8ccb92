#include "socdist/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "socdist/error.hpp"

namespace socdist::optim {
namespace {

using Vec = std::vector<double>;

class BoxObjective {
public:
    BoxObjective(const Objective& f, std::span<const double> lo, std::span<const double> hi,
                 int budget)
        : f_(f), lo_(lo.begin(), lo.end()), hi_(hi.begin(), hi.end()), budget_(budget) {}

    double operator()(Vec& u) {
        for (auto& v : u) v = std::clamp(v, 0.0, 1.0);
        Vec x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = lo_[i] + u[i] * (hi_[i] - lo_[i]);
        ++evaluations_;
        const double y = f_(x);
        return std::isfinite(y) ? y : std::numeric_limits<double>::infinity();
    }

    Vec to_real(const Vec& u) const {
        Vec x(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) x[i] = lo_[i] + u[i] * (hi_[i] - lo_[i]);
        return x;
    }

    bool exhausted() const noexcept { return evaluations_ >= budget_; }
    int evaluations() const noexcept { return evaluations_; }

private:
    const Objective& f_;
    Vec lo_, hi_;
    int budget_;
    int evaluations_ = 0;
};

double diameter(const std::vector<Vec>& simplex) {
    double d = 0.0;
    for (std::size_t i = 1; i < simplex.size(); ++i) {
        double sq = 0.0;
        for (std::size_t k = 0; k < simplex[0].size(); ++k) {
            const double diff = simplex[i][k] - simplex[0][k];
            sq += diff * diff;
        }
        d = std::max(d, std::sqrt(sq));
    }
    return d;
}

}  // namespace

SimplexResult minimize_bounded(const Objective& f, std::span<const double> start,
                               std::span<const double> lower, std::span<const double> upper,
                               const SimplexOptions& options) {
    const std::size_t n = start.size();
    if (n == 0 || lower.size() != n || upper.size() != n) {
        throw ConfigError("simplex: start and bounds must have the same non-zero dimension");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(upper[i] > lower[i])) throw ConfigError("simplex: empty bound interval");
    }

    BoxObjective g(f, lower, upper, options.max_evaluations);
    Vec best(n);
    for (std::size_t i = 0; i < n; ++i) {
        best[i] = std::clamp((start[i] - lower[i]) / (upper[i] - lower[i]), 0.0, 1.0);
    }
    double best_value = std::numeric_limits<double>::infinity();
    SimplexResult result;

    double step = options.initial_step;
    for (int round = 0; round <= options.restarts && !g.exhausted(); ++round) {
        std::vector<Vec> simplex{best};
        for (std::size_t i = 0; i < n; ++i) {
            Vec v = best;
            v[i] += v[i] + step <= 1.0 ? step : -step;
            simplex.push_back(std::move(v));
        }
        std::vector<double> values;
        for (auto& v : simplex) values.push_back(g(v));

        bool converged = false;
        std::vector<std::size_t> order(n + 1);
        while (!g.exhausted()) {
            std::iota(order.begin(), order.end(), 0);
            std::stable_sort(order.begin(), order.end(),
                             [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
            std::vector<Vec> s2;
            std::vector<double> v2;
            for (auto i : order) {
                s2.push_back(simplex[i]);
                v2.push_back(values[i]);
            }
            simplex = std::move(s2);
            values = std::move(v2);

            if (diameter(simplex) < options.tolerance) {
                converged = true;
                break;
            }

            Vec centroid(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[i][k] / n;
            auto along = [&](double t) {
                Vec p(n);
                for (std::size_t k = 0; k < n; ++k)
                    p[k] = centroid[k] + t * (centroid[k] - simplex[n][k]);
                return p;
            };

            Vec reflected = along(1.0);
            const double fr = g(reflected);
            if (fr < values[0]) {
                Vec expanded = along(2.0);
                const double fe = g(expanded);
                if (fe < fr) {
                    simplex[n] = std::move(expanded);
                    values[n] = fe;
                } else {
                    simplex[n] = std::move(reflected);
                    values[n] = fr;
                }
            } else if (fr < values[n - 1]) {
                simplex[n] = std::move(reflected);
                values[n] = fr;
            } else {
                Vec contracted = fr < values[n] ? along(0.5) : along(-0.5);
                const double fc = g(contracted);
                if (fc < std::min(fr, values[n])) {
                    simplex[n] = std::move(contracted);
                    values[n] = fc;
                } else {
                    for (std::size_t i = 1; i <= n; ++i) {
                        for (std::size_t k = 0; k < n; ++k)
                            simplex[i][k] = simplex[0][k] + 0.5 * (simplex[i][k] - simplex[0][k]);
                        values[i] = g(simplex[i]);
                    }
                }
            }
        }

        const auto it = std::min_element(values.begin(), values.end());
        if (*it <= best_value) {
            best_value = *it;
            best = simplex[static_cast<std::size_t>(it - values.begin())];
        }
        result.converged = converged;
        result.restarts_used = round;
        step = options.restart_step;
    }

    result.x = g.to_real(best);
    result.value = best_value;
    result.evaluations = g.evaluations();
    return result;
}

}  // namespace socdist::optim
