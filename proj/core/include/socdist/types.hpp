#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace socdist {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

double distance(const Point2& a, const Point2& b) noexcept;

struct FrameGeometry {
    int width = 0;
    int height = 0;

    bool valid() const noexcept { return width >= 1 && height >= 1; }
    friend bool operator==(const FrameGeometry&, const FrameGeometry&) = default;
};

/// Axis-aligned box, top-left image origin, y grows downward.
struct BoundingBox {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 0.0;
    double y_max = 0.0;

    double width() const noexcept { return x_max - x_min; }
    double height() const noexcept { return y_max - y_min; }
    double area() const noexcept { return width() * height(); }
    bool valid() const noexcept { return x_min < x_max && y_min < y_max; }

    /// Midpoint of the bottom edge; the person's ground contact point.
    Point2 feet() const noexcept { return {0.5 * (x_min + x_max), y_max}; }

    BoundingBox clamped(const FrameGeometry& geometry) const noexcept;
    bool inside(const FrameGeometry& geometry) const noexcept;

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Detection {
    BoundingBox box;
    double confidence = 1.0;

    friend bool operator==(const Detection&, const Detection&) = default;
};

struct FrameDetections {
    std::int64_t frame_index = 0;
    double timestamp = 0.0;
    std::vector<Detection> detections;
};

using TrackId = std::int64_t;

/// Unordered index or id pair, stored with first < second.
template <typename T>
constexpr std::pair<T, T> ordered_pair(T a, T b) noexcept {
    return a < b ? std::pair<T, T>{a, b} : std::pair<T, T>{b, a};
}

using IndexPair = std::pair<std::size_t, std::size_t>;
using IdPair = std::pair<TrackId, TrackId>;

}  // namespace socdist
