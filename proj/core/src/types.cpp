#include "socdist/types.hpp"

#include <algorithm>
#include <cmath>

namespace socdist {

double distance(const Point2& a, const Point2& b) noexcept {
    return std::hypot(a.x - b.x, a.y - b.y);
}

BoundingBox BoundingBox::clamped(const FrameGeometry& geometry) const noexcept {
    const double w = geometry.width;
    const double h = geometry.height;
    return {std::clamp(x_min, 0.0, w), std::clamp(y_min, 0.0, h),
            std::clamp(x_max, 0.0, w), std::clamp(y_max, 0.0, h)};
}

bool BoundingBox::inside(const FrameGeometry& geometry) const noexcept {
    return x_min >= 0.0 && y_min >= 0.0 && x_max <= geometry.width &&
           y_max <= geometry.height && x_min <= x_max && y_min <= y_max;
}

}  // namespace socdist
