#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "socdist/camera_model.hpp"
#include "socdist/ingest.hpp"

namespace socdist::synth {

using geo_auto::CameraParams;
using geo_auto::GroundPoint;

struct Waypoint {
    double t = 0.0;
    GroundPoint position;
};

/// A person walking piecewise-linearly between waypoints at constant speed per segment.
struct SyntheticPerson {
    TrackId id = 0;
    double height_m = 1.70;
    std::vector<Waypoint> trajectory;  // sorted by t
    double t_begin = 0.0;
    double t_end = 0.0;

    /// Position at t, or nullopt outside the presence interval.
    std::optional<GroundPoint> position_at(double t) const;
};

struct PeopleRecipe {
    std::size_t count = 10;
    double min_speed = 0.5;  // m/s
    double max_speed = 1.5;
    double min_depth_m = 6.0;
    double max_depth_m = 25.0;
    double height_mean_m = 1.70;
    double height_std_m = 0.0;  // 0 gives every person the mean height
    double height_min_m = 1.5;
    double height_max_m = 1.9;
    /// Resample each walker until it stays in view for the whole scene.
    bool stay_visible = false;
};

struct NoiseSpec {
    double jitter_px = 0.0;           // Gaussian std on each box edge
    double drop_probability = 0.0;    // Bernoulli per detection
};

struct SceneSpec {
    CameraParams camera{3.0, 0.9, 0.5};
    FrameGeometry geometry{1920, 1080};
    double fps = 25.0;
    double duration_s = 10.0;
    std::vector<SyntheticPerson> people;
    std::optional<PeopleRecipe> recipe;  // appended after explicit people
    NoiseSpec noise;
    std::uint64_t seed = 1;
    double radius_m = 1.0;
    double width_fraction = 0.4;
    geo_auto::LateralGrouping grouping = geo_auto::LateralGrouping::FullProduct;

    void validate() const;
    std::size_t frame_count() const;
};

struct SyntheticScene {
    std::vector<FrameDetections> frames;
    std::vector<std::vector<TrackId>> truth_ids;      // parallel to frames[f].detections
    ingest::IdentifiedSequence ground_truth;          // noise-free boxes of visible people
    std::vector<std::vector<IdPair>> violations;      // visible pairs closer than 2 * radius
    std::vector<SyntheticPerson> people;
};

/// Box of a person of height `height_m` standing at `g`: the exact inverse of
/// ground_position and estimated_height. Throws NotVisibleError when the box leaves the
/// frame or the person is behind the camera.
BoundingBox forward_project(const GroundPoint& g, double height_m, const CameraParams& cam,
                            const FrameGeometry& geom, double width_fraction = 0.4,
                            geo_auto::LateralGrouping grouping =
                                geo_auto::LateralGrouping::FullProduct);

/// Largest |lateral| still imaged at `depth_m` (feet on the frame edge).
double max_visible_lateral(double depth_m, const CameraParams& cam, const FrameGeometry& geom);

/// Deterministic in the seed.
SyntheticScene generate_scene(const SceneSpec& spec);

void write_detections_csv(std::ostream& out, const SyntheticScene& scene);
void write_ground_truth_csv(std::ostream& out, const ingest::IdentifiedSequence& seq);
void write_violations_csv(std::ostream& out, const SyntheticScene& scene);

}  // namespace socdist::synth
