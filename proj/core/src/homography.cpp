#include "socdist/homography.hpp"

#include <cmath>
#include <numeric>

#include <Eigen/Dense>

#include "socdist/error.hpp"

namespace socdist::geo_tool {
namespace {

using Real = long double;
using Mat3L = Eigen::Matrix<Real, 3, 3>;

double cross(const Point2& o, const Point2& a, const Point2& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}

double quad_extent(const Quad& q) {
    double extent = 0.0;
    for (const auto& a : q)
        for (const auto& b : q) extent = std::max(extent, distance(a, b));
    return extent;
}

void require_general_position(const Quad& q, const char* which) {
    const double extent = quad_extent(q);
    if (!(extent > 0.0) || !std::isfinite(extent)) {
        throw SingularSystemError(std::string(which) + " points are coincident or not finite");
    }
    static constexpr std::array<std::array<int, 3>, 4> triples{
        {{0, 1, 2}, {0, 1, 3}, {0, 2, 3}, {1, 2, 3}}};
    for (const auto& t : triples) {
        const double area = std::abs(cross(q[t[0]], q[t[1]], q[t[2]]));
        if (area <= 1e-12 * extent * extent) {
            throw SingularSystemError(std::string(which) + " points p" + std::to_string(t[0]) +
                                      ", p" + std::to_string(t[1]) + ", p" +
                                      std::to_string(t[2]) + " are collinear");
        }
    }
}

// Similarity that moves the centroid to the origin with mean distance sqrt(2).
Mat3L normalizer(const Quad& q) {
    Real cx = 0, cy = 0;
    for (const auto& p : q) {
        cx += p.x;
        cy += p.y;
    }
    cx /= 4;
    cy /= 4;
    Real mean = 0;
    for (const auto& p : q) mean += std::hypot(Real(p.x) - cx, Real(p.y) - cy);
    mean /= 4;
    const Real s = std::sqrt(Real(2)) / mean;
    Mat3L t;
    t << s, 0, -s * cx, 0, s, -s * cy, 0, 0, 1;
    return t;
}

Eigen::Matrix<Real, 2, 1> apply(const Mat3L& t, const Point2& p) {
    const Eigen::Matrix<Real, 3, 1> v = t * Eigen::Matrix<Real, 3, 1>(p.x, p.y, 1);
    return {v(0) / v(2), v(1) / v(2)};
}

}  // namespace

Matrix3 compute_homography(const Quad& src, const Quad& dst) {
    require_general_position(src, "source");
    require_general_position(dst, "target");

    const Mat3L ts = normalizer(src);
    const Mat3L td = normalizer(dst);

    Eigen::Matrix<Real, 8, 8> a;
    Eigen::Matrix<Real, 8, 1> rhs;
    for (int i = 0; i < 4; ++i) {
        const auto s = apply(ts, src[i]);
        const auto d = apply(td, dst[i]);
        const Real x = s(0), y = s(1), u = d(0), v = d(1);
        a.row(2 * i) << x, y, 1, 0, 0, 0, -u * x, -u * y;
        a.row(2 * i + 1) << 0, 0, 0, x, y, 1, -v * x, -v * y;
        rhs(2 * i) = u;
        rhs(2 * i + 1) = v;
    }
    Eigen::FullPivLU<Eigen::Matrix<Real, 8, 8>> lu(a);
    if (lu.rank() < 8) {
        throw SingularSystemError("homography system is singular for the given correspondences");
    }
    Eigen::Matrix<Real, 8, 1> h = lu.solve(rhs);
    // one step of iterative refinement
    h += lu.solve(rhs - a * h);

    Mat3L hn;
    hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), 1;
    Mat3L m = td.inverse() * hn * ts;
    if (std::abs(m(2, 2)) < Real(1e-300)) {
        throw SingularSystemError("homography cannot be normalized: origin maps to infinity");
    }
    m /= m(2, 2);
    if (!std::isfinite(static_cast<double>(m.determinant())) || m.determinant() == 0) {
        throw SingularSystemError("homography is singular");
    }
    return m.cast<double>();
}

Point2 warp_point(const Matrix3& m, const Point2& p) {
    const Real x = p.x, y = p.y;
    const Real u = m(0, 0) * x + m(0, 1) * y + m(0, 2);
    const Real v = m(1, 0) * x + m(1, 1) * y + m(1, 2);
    const Real w = m(2, 0) * x + m(2, 1) * y + m(2, 2);
    if (std::abs(w) <= kHorizonEpsilon) {
        throw HorizonError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                           ") maps to the line at infinity");
    }
    return {static_cast<double>(u / w), static_cast<double>(v / w)};
}

Matrix3 inverse_homography(const Matrix3& m) {
    Mat3L inv = m.cast<Real>().inverse();
    if (std::abs(inv(2, 2)) > Real(1e-300)) inv /= inv(2, 2);
    return inv.cast<double>();
}

Quad default_target_rect(const Quad& q) {
    const double w = 0.5 * (distance(q[0], q[1]) + distance(q[3], q[2]));
    const double h = 0.5 * (distance(q[0], q[3]) + distance(q[1], q[2]));
    return {Point2{0.0, 0.0}, Point2{w, 0.0}, Point2{w, h}, Point2{0.0, h}};
}

bool is_convex(const Quad& q) {
    int sign = 0;
    for (int i = 0; i < 4; ++i) {
        const double c = cross(q[i], q[(i + 1) % 4], q[(i + 2) % 4]);
        if (c == 0.0) return false;
        const int s = c > 0 ? 1 : -1;
        if (sign == 0) sign = s;
        if (s != sign) return false;
    }
    return true;
}

void ReferenceSegment::validate() const {
    if (a == b) throw ConfigError("reference segment endpoints coincide");
    if (!(real_length_m > 0.0)) throw ConfigError("reference real length must be positive");
}

ScaleEstimate scale_from_references(const Matrix3& m, std::span<const ReferenceSegment> refs,
                                    double disagreement_tolerance) {
    if (refs.empty()) throw ConfigError("at least one reference segment is required");
    ScaleEstimate est;
    for (const auto& r : refs) {
        r.validate();
        const double px = distance(warp_point(m, r.a), warp_point(m, r.b));
        est.per_reference.push_back(px / r.real_length_m);
    }
    est.px_per_m = std::accumulate(est.per_reference.begin(), est.per_reference.end(), 0.0) /
                   static_cast<double>(est.per_reference.size());
    if (!(est.px_per_m > 0.0)) throw ConfigError("reference segments collapse in bird's-eye view");
    const auto [lo, hi] = std::minmax_element(est.per_reference.begin(), est.per_reference.end());
    est.disagreement = (*hi - *lo) / est.px_per_m > disagreement_tolerance;
    return est;
}

HomographyCalibration::HomographyCalibration(const Matrix3& matrix, double px_per_m,
                                             double threshold_m)
    : matrix_(matrix), px_per_m_(px_per_m), threshold_m_(threshold_m) {
    if (!matrix_.allFinite() || std::abs(matrix_.determinant()) == 0.0) {
        throw ConfigError("calibration matrix is singular");
    }
    if (!(px_per_m_ > 0.0)) throw ConfigError("scale_px_per_m must be positive");
    if (!(threshold_m_ > 0.0)) throw ConfigError("threshold_m must be positive");
    inverse_ = inverse_homography(matrix_);
    visible_side_ = matrix_(2, 2) < 0 ? -1.0 : 1.0;
}

namespace {

Matrix3 quad_matrix(const Quad& quad, const Quad& target) {
    if (!is_convex(quad)) {
        require_general_position(quad, "quad");
        throw SingularSystemError("quad is not convex");
    }
    const bool axis_aligned = target[0].y == target[1].y && target[1].x == target[2].x &&
                              target[2].y == target[3].y && target[3].x == target[0].x;
    if (!axis_aligned) throw ConfigError("target rectangle must be axis-aligned");
    return compute_homography(quad, target);
}

double side_of(const Matrix3& m, const Quad& quad) {
    Point2 c{0, 0};
    for (const auto& p : quad) {
        c.x += 0.25 * p.x;
        c.y += 0.25 * p.y;
    }
    return m(2, 0) * c.x + m(2, 1) * c.y + m(2, 2) < 0 ? -1.0 : 1.0;
}

}  // namespace

HomographyCalibration HomographyCalibration::from_quad(const Quad& quad, std::optional<Quad> rect,
                                                       double px_per_m, double threshold_m) {
    const Quad target = rect.value_or(default_target_rect(quad));
    const Matrix3 m = quad_matrix(quad, target);
    HomographyCalibration cal(m, px_per_m, threshold_m);
    cal.quad_ = quad;
    cal.rect_ = target;
    cal.visible_side_ = side_of(m, quad);
    return cal;
}

HomographyCalibration HomographyCalibration::from_quad(const Quad& quad, std::optional<Quad> rect,
                                                       std::span<const ReferenceSegment> refs,
                                                       double threshold_m,
                                                       std::vector<std::string>* warnings) {
    const Quad target = rect.value_or(default_target_rect(quad));
    const Matrix3 m = quad_matrix(quad, target);
    const auto scale = scale_from_references(m, refs);
    if (scale.disagreement && warnings) {
        warnings->push_back("reference lengths disagree by more than 15%");
    }
    HomographyCalibration cal(m, scale.px_per_m, threshold_m);
    cal.quad_ = quad;
    cal.rect_ = target;
    cal.visible_side_ = side_of(m, quad);
    return cal;
}

std::optional<Point2> HomographyCalibration::try_birdseye(const Point2& p) const {
    const double w = matrix_(2, 0) * p.x + matrix_(2, 1) * p.y + matrix_(2, 2);
    if (w * visible_side_ <= kHorizonEpsilon) return std::nullopt;
    return warp_point(matrix_, p);
}

Point2 HomographyCalibration::to_birdseye(const Point2& p) const {
    if (auto q = try_birdseye(p)) return *q;
    throw HorizonError("point (" + std::to_string(p.x) + ", " + std::to_string(p.y) +
                       ") lies on or beyond the horizon");
}

double HomographyCalibration::ground_distance_m(const Point2& a, const Point2& b) const {
    return distance(to_birdseye(a), to_birdseye(b)) / px_per_m_;
}

BirdseyeViolations birdseye_violations(const HomographyCalibration& cal,
                                       std::span<const Point2> feet) {
    BirdseyeViolations out;
    out.warped.reserve(feet.size());
    for (const auto& p : feet) {
        out.warped.push_back(cal.try_birdseye(p));
        if (!out.warped.back()) ++out.horizon_excluded;
    }
    const double threshold = cal.threshold_m();
    for (std::size_t i = 0; i < feet.size(); ++i) {
        if (!out.warped[i]) continue;
        for (std::size_t j = i + 1; j < feet.size(); ++j) {
            if (!out.warped[j]) continue;
            if (distance(*out.warped[i], *out.warped[j]) / cal.px_per_m() < threshold) {
                out.pairs.emplace_back(i, j);
            }
        }
    }
    return out;
}

}  // namespace socdist::geo_tool
