#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "socdist/types.hpp"

namespace socdist::geo_auto {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) noexcept { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) noexcept { return rad * 180.0 / kPi; }

/// Monocular camera over a flat ground plane.
struct CameraParams {
    double height_m = 0.0;   // above ground
    double vfov_rad = 0.0;   // vertical field of view
    double tilt_rad = 0.0;   // downward from horizontal

    /// Throws ConfigError when outside 0 < h, 0 < fov < pi, 0 < tilt < pi/2.
    void validate() const;
    friend bool operator==(const CameraParams&, const CameraParams&) = default;
};

/// How the squared lateral term of the projected-height model is grouped.
enum class LateralGrouping {
    /// sqrt(1 + [4 * offset * cos(p) * tan(fov/2)]^2): secant of the lateral ray angle.
    FullProduct,
    /// sqrt(1 + 4 * offset * cos(p) * tan(fov/2)^2).
    OffsetOnly,
};

const char* to_string(LateralGrouping g) noexcept;

struct GroundPoint {
    double lateral_m = 0.0;  // signed, camera-centred
    double depth_m = 0.0;    // along the ground away from the camera foot
};

struct ProximityEllipse {
    Point2 center;
    double semi_major_px = 0.0;  // horizontal
    double semi_minor_px = 0.0;  // vertical
    double radius_m = 1.0;
};

/// Default lower bound on sin(tilt - ray angle) before a ray counts as above the horizon.
inline constexpr double kHorizonSinEpsilon = 1e-6;

/// Angle of an image row above the optical axis; rows are mapped linearly over the FOV.
double row_angle(double row, const CameraParams& cam, const FrameGeometry& geom) noexcept;

/// Real-world height implied by a box under `cam`. Throws HorizonError when the head ray
/// does not point below the horizon by at least `epsilon` (in sine).
double estimated_height(const BoundingBox& box, const CameraParams& cam,
                        const FrameGeometry& geom,
                        LateralGrouping grouping = LateralGrouping::FullProduct,
                        double epsilon = kHorizonSinEpsilon);

/// Feet location on the ground. Throws HorizonError when the feet ray misses the ground.
GroundPoint ground_position(const BoundingBox& box, const CameraParams& cam,
                            const FrameGeometry& geom);

ProximityEllipse proximity_ellipse(const BoundingBox& box, const CameraParams& cam,
                                   const FrameGeometry& geom, double radius_m = 1.0);

/// Batch form; entries are nullopt for people whose feet are above the horizon.
std::vector<std::optional<ProximityEllipse>> proximity_ellipses(
    std::span<const BoundingBox> boxes, const CameraParams& cam, const FrameGeometry& geom,
    double radius_m = 1.0);

/// Pairs (i < j) strictly closer than `limit_m` on the ground.
std::vector<IndexPair> ground_violations(std::span<const std::optional<GroundPoint>> points,
                                         double limit_m);

struct AutoViolations {
    std::vector<IndexPair> pairs;
    std::vector<std::optional<GroundPoint>> ground;
    std::vector<std::optional<ProximityEllipse>> ellipses;
    std::vector<bool> violating;  // red when true, green otherwise
    std::size_t horizon_excluded = 0;
};

/// Ellipse overlap in the image is equivalent to circle overlap on the ground, so the test
/// is done on ground distances against 2 * radius_m.
AutoViolations auto_violations(std::span<const BoundingBox> boxes, const CameraParams& cam,
                               const FrameGeometry& geom, double radius_m = 1.0);

/// Recommended operating bands for reliable automatic calibration.
struct SettingBands {
    double min_height_m = 2.5;
    double max_height_m = 5.0;
    double min_tilt_rad = deg2rad(5.0);
    double max_tilt_rad = deg2rad(45.0);
    double min_distance_m = 10.0;
    double max_distance_m = 30.0;
};

std::vector<std::string> validate_camera_setting(const CameraParams& cam, double mean_depth_m,
                                                 const SettingBands& bands = {});

}  // namespace socdist::geo_auto
