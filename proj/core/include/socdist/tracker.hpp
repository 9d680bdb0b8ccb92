#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "socdist/types.hpp"

namespace socdist::tracker {

/// Intersection over union; 0 for disjoint or degenerate boxes.
double iou(const BoundingBox& a, const BoundingBox& b) noexcept;

struct TrackerConfig {
    double iou_min = 0.3;
    int max_staleness = 12;
    int min_hits = 3;
    double process_noise = 1.0;       // px^2/frame^2 on the velocities
    double size_process_noise = 1.0;  // px^2/frame on width and height
    double measurement_noise = 10.0;  // px^2 on centre, width and height
    double initial_velocity_variance = 100.0;
    /// Confirmed tracks coasting for at most this many frames are still reported.
    int max_output_staleness = 0;

    void validate() const;
};

enum class TrackStatus { Tentative, Confirmed, Dead };

/// Constant-velocity Kalman state over (cx, cy, w, h, vcx, vcy).
class Track {
public:
    using State = Eigen::Matrix<double, 6, 1>;
    using Covariance = Eigen::Matrix<double, 6, 6>;

    Track(TrackId id, const Detection& det, const TrackerConfig& cfg);

    void predict(const TrackerConfig& cfg);
    void update(const Detection& det, const TrackerConfig& cfg);
    void mark_missed(const TrackerConfig& cfg);

    TrackId id() const noexcept { return id_; }
    BoundingBox box() const noexcept;
    const State& state() const noexcept { return mean_; }
    const Covariance& covariance() const noexcept { return cov_; }
    int hits() const noexcept { return hits_; }
    int staleness() const noexcept { return staleness_; }
    TrackStatus status() const noexcept { return status_; }
    double confidence() const noexcept { return confidence_; }

private:
    TrackId id_;
    State mean_;
    Covariance cov_;
    int hits_ = 1;
    int staleness_ = 0;
    TrackStatus status_ = TrackStatus::Tentative;
    double confidence_ = 1.0;
};

struct TrackOutput {
    TrackId id = 0;
    BoundingBox box;
    double confidence = 1.0;
    /// Index of the detection that updated this track in the current frame.
    std::optional<std::size_t> detection_index;
};

/// Greedy-IOU tracking-by-detection. One instance per feed; not thread-safe.
class MultiTracker {
public:
    explicit MultiTracker(TrackerConfig cfg = {});

    /// Advances one frame. Returns the confirmed tracks ordered by id. During the first
    /// min_hits frames of a stream tentative matched tracks are reported as well.
    /// Throws SequenceError when frame indices do not increase.
    std::vector<TrackOutput> step(const FrameDetections& frame);

    const std::vector<Track>& tracks() const noexcept { return tracks_; }
    const TrackerConfig& config() const noexcept { return cfg_; }
    TrackId next_id() const noexcept { return next_id_; }

private:
    TrackerConfig cfg_;
    std::vector<Track> tracks_;
    TrackId next_id_ = 0;
    std::int64_t frames_seen_ = 0;
    std::optional<std::int64_t> last_frame_;
};

}  // namespace socdist::tracker
