#include "socdist/tracker.hpp"

#include <algorithm>
#include <tuple>

#include <Eigen/Dense>

#include "socdist/error.hpp"

namespace socdist::tracker {
namespace {

using Mat6 = Track::Covariance;
using Vec6 = Track::State;
using Mat46 = Eigen::Matrix<double, 4, 6>;
using Mat4 = Eigen::Matrix4d;
using Vec4 = Eigen::Vector4d;

constexpr double kMinSize = 1e-3;

Mat6 transition() {
    Mat6 f = Mat6::Identity();
    f(0, 4) = 1.0;
    f(1, 5) = 1.0;
    return f;
}

Mat46 observation() {
    Mat46 h = Mat46::Zero();
    h.block<4, 4>(0, 0).setIdentity();
    return h;
}

Vec4 measure(const BoundingBox& b) {
    return {0.5 * (b.x_min + b.x_max), 0.5 * (b.y_min + b.y_max), b.width(), b.height()};
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) noexcept {
    const double ix = std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min);
    const double iy = std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min);
    if (ix <= 0.0 || iy <= 0.0) return 0.0;
    const double inter = ix * iy;
    const double uni = a.area() + b.area() - inter;
    return uni > 0.0 ? inter / uni : 0.0;
}

void TrackerConfig::validate() const {
    if (!(iou_min > 0.0 && iou_min < 1.0)) throw ConfigError("iou_min must be in (0, 1)");
    if (max_staleness < 0) throw ConfigError("max_staleness must be >= 0");
    if (min_hits < 1) throw ConfigError("min_hits must be >= 1");
    if (process_noise < 0.0 || size_process_noise < 0.0 || !(measurement_noise > 0.0)) {
        throw ConfigError("noise scales must be non-negative (measurement noise positive)");
    }
    if (max_output_staleness < 0) throw ConfigError("max_output_staleness must be >= 0");
}

Track::Track(TrackId id, const Detection& det, const TrackerConfig& cfg)
    : id_(id), confidence_(det.confidence) {
    mean_.setZero();
    mean_.head<4>() = measure(det.box);
    cov_.setZero();
    cov_.diagonal() << cfg.measurement_noise, cfg.measurement_noise, cfg.measurement_noise,
        cfg.measurement_noise, cfg.initial_velocity_variance, cfg.initial_velocity_variance;
    if (cfg.min_hits <= 1) status_ = TrackStatus::Confirmed;
}

void Track::predict(const TrackerConfig& cfg) {
    static const Mat6 f = transition();
    Mat6 q = Mat6::Zero();
    q.diagonal() << 0.0, 0.0, cfg.size_process_noise, cfg.size_process_noise, cfg.process_noise,
        cfg.process_noise;
    mean_ = f * mean_;
    cov_ = f * cov_ * f.transpose() + q;
    mean_(2) = std::max(mean_(2), kMinSize);
    mean_(3) = std::max(mean_(3), kMinSize);
}

void Track::update(const Detection& det, const TrackerConfig& cfg) {
    static const Mat46 h = observation();
    const Mat4 r = Mat4::Identity() * cfg.measurement_noise;
    const Vec4 innovation = measure(det.box) - h * mean_;
    const Mat4 s = h * cov_ * h.transpose() + r;
    const Eigen::Matrix<double, 6, 4> k = cov_ * h.transpose() * s.inverse();
    mean_ += k * innovation;
    // Joseph form keeps the covariance symmetric positive semi-definite.
    const Mat6 i_kh = Mat6::Identity() - k * h;
    cov_ = i_kh * cov_ * i_kh.transpose() + k * r * k.transpose();
    cov_ = 0.5 * (cov_ + cov_.transpose()).eval();
    mean_(2) = std::max(mean_(2), kMinSize);
    mean_(3) = std::max(mean_(3), kMinSize);

    ++hits_;
    staleness_ = 0;
    confidence_ = det.confidence;
    if (status_ == TrackStatus::Tentative && hits_ >= cfg.min_hits) {
        status_ = TrackStatus::Confirmed;
    }
}

void Track::mark_missed(const TrackerConfig& cfg) {
    ++staleness_;
    if (staleness_ > cfg.max_staleness) status_ = TrackStatus::Dead;
}

BoundingBox Track::box() const noexcept {
    const double hw = 0.5 * mean_(2);
    const double hh = 0.5 * mean_(3);
    return {mean_(0) - hw, mean_(1) - hh, mean_(0) + hw, mean_(1) + hh};
}

MultiTracker::MultiTracker(TrackerConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<TrackOutput> MultiTracker::step(const FrameDetections& frame) {
    if (last_frame_ && frame.frame_index <= *last_frame_) {
        throw SequenceError("tracker received frame " + std::to_string(frame.frame_index) +
                            " after frame " + std::to_string(*last_frame_));
    }
    last_frame_ = frame.frame_index;
    ++frames_seen_;

    for (auto& t : tracks_) t.predict(cfg_);

    const auto& dets = frame.detections;
    std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
    for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
        const BoundingBox predicted = tracks_[ti].box();
        for (std::size_t di = 0; di < dets.size(); ++di) {
            const double score = iou(predicted, dets[di].box);
            if (score >= cfg_.iou_min) candidates.emplace_back(score, ti, di);
        }
    }
    std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
        return std::get<0>(a) > std::get<0>(b);
    });

    std::vector<std::optional<std::size_t>> track_match(tracks_.size());
    std::vector<bool> det_used(dets.size(), false);
    for (const auto& [score, ti, di] : candidates) {
        if (track_match[ti] || det_used[di]) continue;
        track_match[ti] = di;
        det_used[di] = true;
    }

    for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
        if (track_match[ti]) {
            tracks_[ti].update(dets[*track_match[ti]], cfg_);
        } else {
            tracks_[ti].mark_missed(cfg_);
        }
    }
    for (std::size_t di = 0; di < dets.size(); ++di) {
        if (!det_used[di]) {
            tracks_.emplace_back(next_id_++, dets[di], cfg_);
            track_match.emplace_back(di);
        }
    }

    const bool warm_up = frames_seen_ <= cfg_.min_hits;
    std::vector<TrackOutput> out;
    for (std::size_t ti = 0; ti < tracks_.size(); ++ti) {
        const Track& t = tracks_[ti];
        if (t.status() == TrackStatus::Dead) continue;
        const bool confirmed = t.status() == TrackStatus::Confirmed;
        const bool fresh = t.staleness() == 0;
        if ((confirmed && t.staleness() <= cfg_.max_output_staleness) || (warm_up && fresh)) {
            out.push_back({t.id(), t.box(), t.confidence(),
                           fresh ? track_match[ti] : std::nullopt});
        }
    }
    std::erase_if(tracks_, [](const Track& t) { return t.status() == TrackStatus::Dead; });
    std::sort(out.begin(), out.end(),
              [](const TrackOutput& a, const TrackOutput& b) { return a.id < b.id; });
    return out;
}

}  // namespace socdist::tracker
