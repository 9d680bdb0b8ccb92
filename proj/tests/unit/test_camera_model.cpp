#include <cmath>
#include <random>

#include "doctest.h"
#include "socdist/camera_model.hpp"
#include "socdist/error.hpp"
#include "socdist/synth.hpp"

using namespace socdist;
using namespace socdist::geo_auto;

namespace {
const FrameGeometry kHd{1920, 1080};
const CameraParams kCam{3.0, 0.9, 0.5};
}

TEST_CASE("projected height: centred worked example") {
    const BoundingBox box{860, 400, 1060, 700};
    CHECK(std::abs(row_angle(400, kCam, kHd) - 0.11666666666666668) < 1e-15);
    CHECK(std::abs(estimated_height(box, kCam, kHd) - 2.1379386711941315) < 1e-12);
    CHECK(std::abs(estimated_height(box, kCam, kHd, LateralGrouping::OffsetOnly) -
                   2.1379386711941315) < 1e-12);
}

TEST_CASE("projected height is linear in camera height") {
    const BoundingBox box{300, 380, 420, 690};
    const CameraParams twice{6.0, 0.9, 0.5};
    CHECK(estimated_height(box, twice, kHd) ==
          doctest::Approx(2.0 * estimated_height(box, kCam, kHd)).epsilon(1e-14));
}

TEST_CASE("projected height grows with lateral offset") {
    const BoundingBox centred{860, 400, 1060, 700};
    const BoundingBox left{60, 400, 260, 700};
    CHECK(estimated_height(left, kCam, kHd) > estimated_height(centred, kCam, kHd));
    CHECK(estimated_height(left, kCam, kHd, LateralGrouping::OffsetOnly) !=
          estimated_height(left, kCam, kHd));
}

TEST_CASE("projected height fails at the horizon") {
    const CameraParams flat{3.0, 0.9, 0.05};
    const BoundingBox box{860, 10, 1060, 700};
    CHECK_THROWS_AS(estimated_height(box, flat, kHd), HorizonError);
}

TEST_CASE("ground position: worked example") {
    const BoundingBox box{860, 400, 1060, 700};
    const auto g = ground_position(box, kCam, kHd);
    CHECK(g.lateral_m == 0.0);
    CHECK(std::abs(g.depth_m - 4.085898957451618) < 1e-12);
}

TEST_CASE("ground position: depth decreases as feet move down") {
    double prev = 1e300;
    for (double y = 560; y < 1080; y += 20) {
        const double d = ground_position({900, y - 200, 1000, y}, kCam, kHd).depth_m;
        CHECK(d < prev);
        prev = d;
    }
    const CameraParams shallow{3.0, 0.9, 0.05};
    CHECK(ground_position({900, 300, 1000, 541}, shallow, kHd).depth_m > 50.0);
}

TEST_CASE("ground position above the horizon") {
    const CameraParams shallow{3.0, 0.9, 0.05};
    CHECK_THROWS_AS(ground_position({900, 100, 1000, 300}, shallow, kHd), HorizonError);
}

TEST_CASE("proximity ellipse") {
    const BoundingBox box{860, 400, 1060, 700};
    const auto a = proximity_ellipse(box, kCam, kHd);
    const auto b = proximity_ellipse(box, kCam, kHd);
    CHECK(a.semi_major_px == b.semi_major_px);
    CHECK(a.semi_minor_px < a.semi_major_px);
    CHECK(a.center == box.feet());

    const auto zero = proximity_ellipse(box, kCam, kHd, 0.0);
    CHECK(zero.semi_major_px == 0.0);
    CHECK(zero.semi_minor_px == 0.0);

    // Doubling the slant distance halves the horizontal radius.
    const double f = 540.0 / std::tan(0.45);
    const double slant = 3.0 / std::sin(0.5 + 0.13333333333333333);
    CHECK(a.semi_major_px == doctest::Approx(f / slant).epsilon(1e-12));
    const double near_major = a.semi_major_px;
    const double deep = 2.0 * ground_position(box, kCam, kHd).depth_m;
    const auto far_box = synth::forward_project({0.0, deep}, 1.7, kCam, kHd);
    const auto far = proximity_ellipse(far_box, kCam, kHd);
    const double slant_far = std::hypot(3.0, deep);
    CHECK(far.semi_major_px == doctest::Approx(near_major * slant / slant_far).epsilon(1e-9));
}

TEST_CASE("ground violations") {
    std::vector<std::optional<GroundPoint>> pts{GroundPoint{0, 4.0}, GroundPoint{1.0, 4.0}};
    CHECK(ground_violations(pts, 2.0).size() == 1);
    pts[1] = GroundPoint{0, 6.2};
    CHECK(ground_violations(pts, 2.0).empty());
    pts[1] = GroundPoint{0, 6.0};
    CHECK(ground_violations(pts, 2.0).empty());
    pts[1] = std::nullopt;
    CHECK(ground_violations(pts, 2.0).empty());
}

TEST_CASE("auto violations mark red and green") {
    const auto a = synth::forward_project({0.0, 8.0}, 1.7, kCam, kHd);
    const auto b = synth::forward_project({1.0, 8.0}, 1.7, kCam, kHd);
    const auto c = synth::forward_project({-3.0, 12.0}, 1.7, kCam, kHd);
    const std::vector<BoundingBox> boxes{a, b, c};
    const auto v = auto_violations(boxes, kCam, kHd);
    REQUIRE(v.pairs.size() == 1);
    CHECK(v.pairs[0] == IndexPair{0, 1});
    CHECK(v.violating == std::vector<bool>{true, true, false});
    CHECK(v.horizon_excluded == 0);
}

TEST_CASE("camera setting bands") {
    CHECK(validate_camera_setting({3.0, 1.0, deg2rad(20)}, 15.0).empty());
    CHECK(validate_camera_setting({6.0, 1.0, deg2rad(20)}, 15.0).size() == 1);
    CHECK(validate_camera_setting({3.0, 1.0, deg2rad(20)}, 4.0).size() == 1);
    CHECK_THROWS_AS(CameraParams({-1.0, 1.0, 0.3}).validate(), ConfigError);
}
