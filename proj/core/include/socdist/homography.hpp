#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "socdist/types.hpp"

namespace socdist::geo_tool {

using Matrix3 = Eigen::Matrix3d;

/// Four image points, wound top-left, top-right, bottom-right, bottom-left.
using Quad = std::array<Point2, 4>;

/// Points closer than this to the vanishing line (|w| after transform) cannot be warped.
inline constexpr double kHorizonEpsilon = 1e-12;

/// Projective map sending src[i] to dst[i] for all four corners, normalized so M(2,2) = 1.
/// Throws SingularSystemError naming the offending points when three of them are collinear.
Matrix3 compute_homography(const Quad& src, const Quad& dst);

Point2 warp_point(const Matrix3& m, const Point2& p);

/// Inverse map, normalized so that its (2,2) entry is 1.
Matrix3 inverse_homography(const Matrix3& m);

/// Axis-aligned rectangle whose sides are the mean opposite-edge lengths of `quad`.
Quad default_target_rect(const Quad& quad);

bool is_convex(const Quad& quad);

struct ReferenceSegment {
    Point2 a;
    Point2 b;
    double real_length_m = 0.0;

    /// Throws ConfigError on coincident endpoints or a non-positive length.
    void validate() const;
};

struct ScaleEstimate {
    double px_per_m = 0.0;
    std::vector<double> per_reference;
    /// Set when the references disagree by more than the tolerance (relative to their mean).
    bool disagreement = false;
};

ScaleEstimate scale_from_references(const Matrix3& m, std::span<const ReferenceSegment> refs,
                                    double disagreement_tolerance = 0.15);

struct BirdseyeViolations {
    std::vector<IndexPair> pairs;
    std::vector<std::optional<Point2>> warped;  // nullopt for people beyond the horizon
    std::size_t horizon_excluded = 0;
};

/// Immutable tool-mode calibration: image -> bird's-eye map plus metric scale.
class HomographyCalibration {
public:
    HomographyCalibration(const Matrix3& matrix, double px_per_m, double threshold_m = 2.0);

    /// Builds the map from a picked quad; `rect` defaults to default_target_rect(quad).
    /// The scale is the mean over `refs`; a disagreement warning is appended to `warnings`.
    static HomographyCalibration from_quad(const Quad& quad, std::optional<Quad> rect,
                                           std::span<const ReferenceSegment> refs,
                                           double threshold_m = 2.0,
                                           std::vector<std::string>* warnings = nullptr);

    /// Same, with a known scale.
    static HomographyCalibration from_quad(const Quad& quad, std::optional<Quad> rect,
                                           double px_per_m, double threshold_m = 2.0);

    const Matrix3& matrix() const noexcept { return matrix_; }
    const Matrix3& inverse() const noexcept { return inverse_; }
    double px_per_m() const noexcept { return px_per_m_; }
    double threshold_m() const noexcept { return threshold_m_; }
    const std::optional<Quad>& quad() const noexcept { return quad_; }
    const std::optional<Quad>& rect() const noexcept { return rect_; }

    /// Throws HorizonError for points on or beyond the vanishing line.
    Point2 to_birdseye(const Point2& image_point) const;
    /// nullopt instead of HorizonError.
    std::optional<Point2> try_birdseye(const Point2& image_point) const;

    /// Ground distance in meters between two image points.
    double ground_distance_m(const Point2& a, const Point2& b) const;

private:
    Matrix3 matrix_;
    Matrix3 inverse_;
    double px_per_m_;
    double threshold_m_;
    double visible_side_ = 1.0;
    std::optional<Quad> quad_;
    std::optional<Quad> rect_;
};

/// Pairs (i < j) whose bird's-eye distance is strictly below the calibration threshold.
BirdseyeViolations birdseye_violations(const HomographyCalibration& cal,
                                       std::span<const Point2> feet_points);

}  // namespace socdist::geo_tool
