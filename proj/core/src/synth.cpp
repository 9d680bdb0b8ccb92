#include "socdist/synth.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "socdist/error.hpp"

namespace socdist::synth {
namespace {

using geo_auto::kPi;

constexpr double kAngleMargin = 2e-6;

// Row whose ray angle above the optical axis is `angle`.
double row_for_angle(double angle, const CameraParams& cam, const FrameGeometry& geom) {
    return geom.height * (0.5 - angle / cam.vfov_rad);
}

SyntheticPerson random_walker(std::mt19937_64& rng, TrackId id, const SceneSpec& spec,
                              const PeopleRecipe& r) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    SyntheticPerson p;
    p.id = id;
    p.height_m = r.height_mean_m;
    if (r.height_std_m > 0.0) {
        std::normal_distribution<double> normal(r.height_mean_m, r.height_std_m);
        do {
            p.height_m = normal(rng);
        } while (p.height_m < r.height_min_m || p.height_m > r.height_max_m);
    }
    const double depth = r.min_depth_m + unit(rng) * (r.max_depth_m - r.min_depth_m);
    const double reach = 0.7 * max_visible_lateral(depth, spec.camera, spec.geometry);
    const double lateral = (2.0 * unit(rng) - 1.0) * reach;
    const double heading = 2.0 * kPi * unit(rng);
    const double speed = r.min_speed + unit(rng) * (r.max_speed - r.min_speed);
    const double travel = speed * spec.duration_s;
    p.t_begin = 0.0;
    p.t_end = spec.duration_s;
    p.trajectory = {{0.0, {lateral, depth}},
                    {spec.duration_s,
                     {lateral + travel * std::cos(heading), depth + travel * std::sin(heading)}}};
    return p;
}

bool visible_throughout(const SyntheticPerson& p, const SceneSpec& spec) {
    const std::size_t n = spec.frame_count();
    for (std::size_t f = 0; f < n; ++f) {
        const auto g = p.position_at(static_cast<double>(f) / spec.fps);
        if (!g) return false;
        try {
            forward_project(*g, p.height_m, spec.camera, spec.geometry, spec.width_fraction,
                            spec.grouping);
        } catch (const Error&) {
            return false;
        }
    }
    return true;
}

}  // namespace

std::optional<GroundPoint> SyntheticPerson::position_at(double t) const {
    if (trajectory.empty() || t < t_begin || t > t_end) return std::nullopt;
    if (t <= trajectory.front().t) return trajectory.front().position;
    for (std::size_t i = 1; i < trajectory.size(); ++i) {
        const auto& a = trajectory[i - 1];
        const auto& b = trajectory[i];
        if (t <= b.t) {
            const double u = b.t > a.t ? (t - a.t) / (b.t - a.t) : 1.0;
            return GroundPoint{a.position.lateral_m + u * (b.position.lateral_m - a.position.lateral_m),
                               a.position.depth_m + u * (b.position.depth_m - a.position.depth_m)};
        }
    }
    return trajectory.back().position;
}

void SceneSpec::validate() const {
    camera.validate();
    if (!geometry.valid()) throw ConfigError("scene geometry must be at least 1x1");
    if (!(fps > 0.0)) throw ConfigError("scene fps must be positive");
    if (!(duration_s >= 0.0)) throw ConfigError("scene duration must be non-negative");
    if (!(noise.drop_probability >= 0.0 && noise.drop_probability <= 1.0)) {
        throw ConfigError("drop probability must be in [0, 1]");
    }
    if (!(noise.jitter_px >= 0.0)) throw ConfigError("jitter must be non-negative");
    for (const auto& p : people) {
        if (p.height_m < 1.4 || p.height_m > 2.1) {
            throw ConfigError("person height must be within [1.4, 2.1] m");
        }
        if (p.trajectory.empty()) throw ConfigError("person trajectory is empty");
    }
    if (recipe) {
        if (recipe->min_depth_m <= 0.0 || recipe->max_depth_m < recipe->min_depth_m ||
            recipe->max_speed < recipe->min_speed || recipe->min_speed < 0.0) {
            throw ConfigError("invalid people recipe");
        }
        if (recipe->height_min_m < 1.4 || recipe->height_max_m > 2.1 ||
            recipe->height_min_m > recipe->height_max_m) {
            throw ConfigError("recipe heights must lie within [1.4, 2.1] m");
        }
    }
}

std::size_t SceneSpec::frame_count() const {
    return static_cast<std::size_t>(std::llround(duration_s * fps));
}

double max_visible_lateral(double depth_m, const CameraParams& cam, const FrameGeometry& geom) {
    const double below = std::atan2(cam.height_m, depth_m);
    const double p_feet = cam.tilt_rad - below;
    const double slant = cam.height_m / std::sin(below);
    const double tan_edge = (static_cast<double>(geom.width) / geom.height) *
                            std::tan(cam.vfov_rad / 2) * std::cos(p_feet);
    return slant * tan_edge;
}

BoundingBox forward_project(const GroundPoint& g, double height_m, const CameraParams& cam,
                            const FrameGeometry& geom, double width_fraction,
                            geo_auto::LateralGrouping grouping) {
    if (!(g.depth_m > 0.0)) throw NotVisibleError("person is behind the camera foot");
    if (!(height_m > 0.0)) throw ConfigError("person height must be positive");

    const double below = std::atan2(cam.height_m, g.depth_m);
    const double p_feet = cam.tilt_rad - below;
    const double y_max = row_for_angle(p_feet, cam, geom);
    const double slant = cam.height_m / std::sin(below);
    const double tan_lateral = g.lateral_m / slant;
    const double offset = tan_lateral * geom.height / (2.0 * std::tan(cam.vfov_rad / 2) *
                                                       std::cos(p_feet));
    const double cx = 0.5 * (offset + geom.width);

    // Head row: the estimated height decreases from +inf (head ray at the horizon) to 0
    // (zero-height box); bisect for the requested height.
    auto height_at = [&](double y_min) {
        const double w = width_fraction * (y_max - y_min);
        const BoundingBox b{cx - 0.5 * w, y_min, cx + 0.5 * w, y_max};
        return geo_auto::estimated_height(b, cam, geom, grouping, 0.0);
    };
    double hi = y_max;
    double lo = row_for_angle(cam.tilt_rad - kAngleMargin, cam, geom);
    if (!(lo < hi)) throw NotVisibleError("feet are at or above the horizon");
    if (height_at(lo) < height_m) throw NotVisibleError("person reaches above the horizon");
    for (int i = 0; i < 2000 && hi - lo > 0.0; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (height_at(mid) > height_m) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    const double y_min =
        std::abs(height_at(lo) - height_m) <= std::abs(height_at(hi) - height_m) ? lo : hi;

    const double w = width_fraction * (y_max - y_min);
    const BoundingBox box{cx - 0.5 * w, y_min, cx + 0.5 * w, y_max};
    if (!box.valid() || !box.inside(geom)) throw NotVisibleError("person is outside the frame");
    return box;
}

SyntheticScene generate_scene(const SceneSpec& spec) {
    spec.validate();
    SyntheticScene scene;
    scene.people = spec.people;

    std::mt19937_64 rng(spec.seed);
    if (spec.recipe) {
        TrackId next = 0;
        for (const auto& p : scene.people) next = std::max(next, p.id + 1);
        for (std::size_t i = 0; i < spec.recipe->count; ++i) {
            SyntheticPerson p;
            for (int attempt = 0; attempt < 1000; ++attempt) {
                p = random_walker(rng, next, spec, *spec.recipe);
                if (!spec.recipe->stay_visible || visible_throughout(p, spec)) break;
            }
            scene.people.push_back(std::move(p));
            ++next;
        }
    }

    std::normal_distribution<double> jitter(0.0, 1.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const std::size_t n = spec.frame_count();
    scene.frames.reserve(n);
    for (std::size_t f = 0; f < n; ++f) {
        const double t = static_cast<double>(f) / spec.fps;
        FrameDetections fd{static_cast<std::int64_t>(f), t, {}};
        std::vector<TrackId> ids;
        std::vector<ingest::IdentifiedBox> truth;
        std::vector<std::pair<TrackId, GroundPoint>> visible;
        for (const auto& p : scene.people) {
            const auto g = p.position_at(t);
            if (!g) continue;
            BoundingBox box;
            try {
                box = forward_project(*g, p.height_m, spec.camera, spec.geometry,
                                      spec.width_fraction, spec.grouping);
            } catch (const Error&) {
                continue;
            }
            visible.emplace_back(p.id, *g);
            truth.push_back({p.id, box});

            BoundingBox noisy = box;
            if (spec.noise.jitter_px > 0.0) {
                noisy.x_min += spec.noise.jitter_px * jitter(rng);
                noisy.y_min += spec.noise.jitter_px * jitter(rng);
                noisy.x_max += spec.noise.jitter_px * jitter(rng);
                noisy.y_max += spec.noise.jitter_px * jitter(rng);
                noisy = noisy.clamped(spec.geometry);
            }
            const bool dropped =
                spec.noise.drop_probability > 0.0 && unit(rng) < spec.noise.drop_probability;
            if (dropped || !noisy.valid()) continue;
            fd.detections.push_back({noisy, 1.0});
            ids.push_back(p.id);
        }

        std::vector<IdPair> pairs;
        for (std::size_t i = 0; i < visible.size(); ++i) {
            for (std::size_t j = i + 1; j < visible.size(); ++j) {
                const auto& a = visible[i].second;
                const auto& b = visible[j].second;
                if (std::hypot(a.lateral_m - b.lateral_m, a.depth_m - b.depth_m) <
                    2.0 * spec.radius_m) {
                    pairs.push_back(ordered_pair(visible[i].first, visible[j].first));
                }
            }
        }
        std::sort(pairs.begin(), pairs.end());

        scene.frames.push_back(std::move(fd));
        scene.truth_ids.push_back(std::move(ids));
        scene.ground_truth.push_back(std::move(truth));
        scene.violations.push_back(std::move(pairs));
    }
    return scene;
}

void write_detections_csv(std::ostream& out, const SyntheticScene& scene) {
    for (const auto& fd : scene.frames) {
        for (const auto& d : fd.detections) {
            out << ingest::format_detection_record(fd.frame_index, d) << '\n';
        }
    }
}

void write_ground_truth_csv(std::ostream& out, const ingest::IdentifiedSequence& seq) {
    for (std::size_t f = 0; f < seq.size(); ++f) {
        for (const auto& o : seq[f]) {
            out << ingest::format_detection_record(static_cast<std::int64_t>(f),
                                                   Detection{o.box, 1.0}, o.id)
                << '\n';
        }
    }
}

void write_violations_csv(std::ostream& out, const SyntheticScene& scene) {
    for (std::size_t f = 0; f < scene.violations.size(); ++f) {
        for (const auto& [a, b] : scene.violations[f]) {
            out << (f + 1) << ',' << a << ',' << b << '\n';
        }
    }
}

}  // namespace socdist::synth
