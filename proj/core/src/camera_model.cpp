#include "socdist/camera_model.hpp"

#include <cmath>

#include "socdist/error.hpp"

namespace socdist::geo_auto {
namespace {

struct FeetRay {
    double angle_below_horizon;  // tilt - row angle
    double slant_m;              // camera to feet along the ray
    double cos_row;
};

FeetRay feet_ray(const BoundingBox& box, const CameraParams& cam, const FrameGeometry& geom) {
    const double p = row_angle(box.y_max, cam, geom);
    const double below = cam.tilt_rad - p;
    const double s = std::sin(below);
    if (!(s > kHorizonSinEpsilon) || !(below < kPi / 2)) {
        throw HorizonError("feet ray does not meet the ground in front of the camera");
    }
    return {below, cam.height_m / s, std::cos(p)};
}

// Tangent of the horizontal ray angle, measured in the plane of the given row.
double lateral_tangent(const BoundingBox& box, double cos_row, const CameraParams& cam,
                       const FrameGeometry& geom) {
    const double offset = (box.x_min + box.x_max - geom.width) / geom.height;
    return offset * std::tan(cam.vfov_rad / 2) * cos_row * 2;
}

}  // namespace

void CameraParams::validate() const {
    if (!(height_m > 0.0)) throw ConfigError("camera height must be positive");
    if (!(vfov_rad > 0.0 && vfov_rad < kPi)) throw ConfigError("vertical FOV must be in (0, pi)");
    if (!(tilt_rad > 0.0 && tilt_rad < kPi / 2)) {
        throw ConfigError("camera tilt must be in (0, pi/2)");
    }
}

const char* to_string(LateralGrouping g) noexcept {
    return g == LateralGrouping::FullProduct ? "full_product" : "offset_only";
}

double row_angle(double row, const CameraParams& cam, const FrameGeometry& geom) noexcept {
    return (0.5 - row / geom.height) * cam.vfov_rad;
}

double estimated_height(const BoundingBox& box, const CameraParams& cam, const FrameGeometry& geom,
                        LateralGrouping grouping, double epsilon) {
    const double p = row_angle(box.y_min, cam, geom);
    const double s = std::sin(cam.tilt_rad - p);
    if (!(s > epsilon)) throw HorizonError("head ray is at or above the horizon");

    const double cos_p = std::cos(p);
    const double half_tan = std::tan(cam.vfov_rad / 2);
    const double offset = (box.x_min + box.x_max - geom.width) / (2.0 * geom.height);
    double secant_sq = 0.0;
    if (grouping == LateralGrouping::FullProduct) {
        const double t = 4.0 * offset * cos_p * half_tan;
        secant_sq = 1.0 + t * t;
    } else {
        secant_sq = 1.0 + 4.0 * offset * cos_p * half_tan * half_tan;
    }
    if (!(secant_sq >= 0.0)) throw HorizonError("lateral term is negative under this grouping");
    return 2.0 * std::sqrt(secant_sq) * (cam.height_m / s) * cos_p * half_tan *
           (box.height() / geom.height);
}

GroundPoint ground_position(const BoundingBox& box, const CameraParams& cam,
                            const FrameGeometry& geom) {
    const FeetRay ray = feet_ray(box, cam, geom);
    GroundPoint g;
    g.depth_m = cam.height_m / std::tan(ray.angle_below_horizon);
    g.lateral_m = ray.slant_m * lateral_tangent(box, ray.cos_row, cam, geom);
    return g;
}

ProximityEllipse proximity_ellipse(const BoundingBox& box, const CameraParams& cam,
                                   const FrameGeometry& geom, double radius_m) {
    const FeetRay ray = feet_ray(box, cam, geom);
    const double focal_px = (geom.height / 2.0) / std::tan(cam.vfov_rad / 2);
    ProximityEllipse e;
    e.center = box.feet();
    e.radius_m = radius_m;
    e.semi_major_px = radius_m * focal_px / ray.slant_m;
    e.semi_minor_px = e.semi_major_px * std::sin(ray.angle_below_horizon);
    return e;
}

std::vector<std::optional<ProximityEllipse>> proximity_ellipses(std::span<const BoundingBox> boxes,
                                                                const CameraParams& cam,
                                                                const FrameGeometry& geom,
                                                                double radius_m) {
    std::vector<std::optional<ProximityEllipse>> out;
    out.reserve(boxes.size());
    for (const auto& b : boxes) {
        try {
            out.emplace_back(proximity_ellipse(b, cam, geom, radius_m));
        } catch (const HorizonError&) {
            out.emplace_back(std::nullopt);
        }
    }
    return out;
}

std::vector<IndexPair> ground_violations(std::span<const std::optional<GroundPoint>> points,
                                         double limit_m) {
    std::vector<IndexPair> pairs;
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (!points[i]) continue;
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            if (!points[j]) continue;
            const double d = std::hypot(points[i]->lateral_m - points[j]->lateral_m,
                                        points[i]->depth_m - points[j]->depth_m);
            if (d < limit_m) pairs.emplace_back(i, j);
        }
    }
    return pairs;
}

AutoViolations auto_violations(std::span<const BoundingBox> boxes, const CameraParams& cam,
                               const FrameGeometry& geom, double radius_m) {
    AutoViolations out;
    out.ground.reserve(boxes.size());
    for (const auto& b : boxes) {
        try {
            out.ground.emplace_back(ground_position(b, cam, geom));
        } catch (const HorizonError&) {
            out.ground.emplace_back(std::nullopt);
            ++out.horizon_excluded;
        }
    }
    out.ellipses = proximity_ellipses(boxes, cam, geom, radius_m);
    out.pairs = ground_violations(out.ground, 2.0 * radius_m);
    out.violating.assign(boxes.size(), false);
    for (const auto& [i, j] : out.pairs) {
        out.violating[i] = true;
        out.violating[j] = true;
    }
    return out;
}

std::vector<std::string> validate_camera_setting(const CameraParams& cam, double mean_depth_m,
                                                 const SettingBands& bands) {
    std::vector<std::string> warnings;
    if (cam.height_m < bands.min_height_m || cam.height_m > bands.max_height_m) {
        warnings.push_back("camera height " + std::to_string(cam.height_m) +
                           " m outside recommended range [" + std::to_string(bands.min_height_m) +
                           ", " + std::to_string(bands.max_height_m) + "] m");
    }
    if (cam.tilt_rad < bands.min_tilt_rad || cam.tilt_rad > bands.max_tilt_rad) {
        warnings.push_back("camera tilt " + std::to_string(rad2deg(cam.tilt_rad)) +
                           " deg outside recommended range [" +
                           std::to_string(rad2deg(bands.min_tilt_rad)) + ", " +
                           std::to_string(rad2deg(bands.max_tilt_rad)) + "] deg");
    }
    if (mean_depth_m < bands.min_distance_m || mean_depth_m > bands.max_distance_m) {
        warnings.push_back("mean camera-person distance " + std::to_string(mean_depth_m) +
                           " m outside recommended range [" +
                           std::to_string(bands.min_distance_m) + ", " +
                           std::to_string(bands.max_distance_m) + "] m");
    }
    return warnings;
}

}  // namespace socdist::geo_auto
