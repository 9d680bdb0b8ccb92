#include "socdist/camera_fit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "socdist/error.hpp"

namespace socdist::geo_auto {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CameraParams from_vec(std::span<const double> x) { return {x[0], x[1], x[2]}; }

std::array<double, 3> to_array(const CameraParams& c) {
    return {c.height_m, c.vfov_rad, c.tilt_rad};
}

double highest_head_angle(std::span<const CalibrationSample> samples, double vfov) {
    double p_max = -kInf;
    for (const auto& s : samples) {
        p_max = std::max(p_max, row_angle(s.box.y_min, {1.0, vfov, 0.0}, s.geometry));
    }
    return p_max;
}

void check_samples(std::span<const CalibrationSample> samples, const FitConfig& config) {
    if (samples.size() < config.min_samples) {
        throw NotEnoughDataError("auto-calibration needs at least " +
                                     std::to_string(config.min_samples) + " samples, got " +
                                     std::to_string(samples.size()),
                                 config.min_samples, samples.size());
    }
    double lo = kInf, hi = -kInf;
    for (const auto& s : samples) {
        const double r = s.box.y_min / s.geometry.height;
        lo = std::min(lo, r);
        hi = std::max(hi, r);
    }
    if (hi - lo < config.min_row_spread) {
        throw NotEnoughDataError("samples do not span enough depth (box tops cover " +
                                     std::to_string(100.0 * (hi - lo)) + "% of the frame, need " +
                                     std::to_string(100.0 * config.min_row_spread) + "%)",
                                 config.min_samples, samples.size());
    }
}

FitResult run_fit(std::span<const CalibrationSample> samples, const FitConfig& config,
                  CameraParams start) {
    // Start inside the region where every head ray points below the horizon.
    const double p_max = highest_head_angle(samples, start.vfov_rad);
    if (start.tilt_rad <= p_max + 0.02) {
        start.tilt_rad = std::min(p_max + 0.05, config.upper.tilt_rad);
    }
    const auto lo = to_array(config.lower);
    const auto hi = to_array(config.upper);
    const auto x0 = to_array(start);
    const auto objective = [&](std::span<const double> x) {
        return calibration_loss(samples, from_vec(x), config.nominal_height_m, config.grouping);
    };
    const auto r = optim::minimize_bounded(objective, x0, lo, hi, config.simplex);

    FitResult out;
    out.camera = from_vec(r.x);
    out.diagnostics.loss = r.value;
    out.diagnostics.evaluations = r.evaluations;
    out.diagnostics.converged = r.converged;
    for (std::size_t i = 0; i < 3; ++i) {
        const double u = (r.x[i] - lo[i]) / (hi[i] - lo[i]);
        if (u < 1e-3 || u > 1.0 - 1e-3) out.diagnostics.at_bound = true;
    }
    return out;
}

}  // namespace

double calibration_loss(std::span<const CalibrationSample> samples, const CameraParams& cam,
                        double nominal_height_m, LateralGrouping grouping) {
    if (samples.empty()) return kInf;
    double sum = 0.0;
    for (const auto& s : samples) {
        const double p = row_angle(s.box.y_min, cam, s.geometry);
        if (!(std::sin(cam.tilt_rad - p) > kHorizonSinEpsilon)) return kInf;
        const double e = estimated_height(s.box, cam, s.geometry, grouping) - nominal_height_m;
        sum += e * e;
    }
    return sum / static_cast<double>(samples.size());
}

FitResult fit_camera_params(std::span<const CalibrationSample> samples, const FitConfig& config) {
    check_samples(samples, config);

    FitResult fit = run_fit(samples, config, config.start);
    std::size_t near = 0;
    std::size_t horizon = 0;

    std::vector<CalibrationSample> kept;
    kept.reserve(samples.size());
    for (const auto& s : samples) {
        try {
            if (ground_position(s.box, fit.camera, s.geometry).depth_m >= config.min_depth_m) {
                kept.push_back(s);
            } else {
                ++near;
            }
        } catch (const HorizonError&) {
            ++horizon;
        }
    }
    if (kept.size() != samples.size()) {
        check_samples(kept, config);
        fit = run_fit(kept, config, fit.camera);
    }
    const std::span<const CalibrationSample> used =
        kept.size() != samples.size() ? std::span<const CalibrationSample>(kept) : samples;

    auto& d = fit.diagnostics;
    d.samples = used.size();
    d.excluded_near = near;
    d.excluded_horizon = horizon;
    d.grouping = config.grouping;

    double mean = 0.0, depth = 0.0;
    std::size_t grounded = 0;
    std::vector<double> heights;
    heights.reserve(used.size());
    for (const auto& s : used) {
        heights.push_back(estimated_height(s.box, fit.camera, s.geometry, config.grouping));
        mean += heights.back();
        try {
            depth += ground_position(s.box, fit.camera, s.geometry).depth_m;
            ++grounded;
        } catch (const HorizonError&) {
        }
    }
    mean /= static_cast<double>(heights.size());
    d.mean_depth_m = grounded ? depth / static_cast<double>(grounded) : 0.0;
    double var = 0.0;
    for (double h : heights) var += (h - mean) * (h - mean);
    d.height_std_m = std::sqrt(var / static_cast<double>(heights.size()));

    d.low_confidence = d.height_std_m > config.max_height_std_m;
    if (d.at_bound) d.warnings.emplace_back("optimizer stopped at a parameter bound");
    if (d.low_confidence) {
        d.warnings.emplace_back("residual height spread " + std::to_string(d.height_std_m) +
                                " m exceeds " + std::to_string(config.max_height_std_m) + " m");
    }
    if (!d.converged) d.warnings.emplace_back("evaluation budget exhausted before convergence");
    for (auto& w : validate_camera_setting(fit.camera, d.mean_depth_m)) {
        d.warnings.push_back(std::move(w));
    }
    return fit;
}

}  // namespace socdist::geo_auto
