#pragma once

#include <span>
#include <string>
#include <vector>

#include "socdist/camera_model.hpp"
#include "socdist/simplex.hpp"

namespace socdist::geo_auto {

struct CalibrationSample {
    BoundingBox box;
    FrameGeometry geometry;
};

struct FitConfig {
    std::size_t min_samples = 200;
    double min_row_spread = 0.15;     // fraction of frame height spanned by box tops
    double nominal_height_m = 1.70;
    double min_depth_m = 2.0;         // closer people are dropped from the samples
    double max_height_std_m = 0.25;   // above this the fit is flagged low-confidence
    LateralGrouping grouping = LateralGrouping::FullProduct;
    // Search box: recommended bands widened by 50% (bounds scaled by 1/1.5 and 1.5).
    CameraParams lower{2.5 / 1.5, deg2rad(30.0) / 1.5, deg2rad(5.0) / 1.5};
    CameraParams upper{5.0 * 1.5, deg2rad(90.0) * 1.5, deg2rad(45.0) * 1.5};
    CameraParams start{3.75, deg2rad(60.0), deg2rad(25.0)};
    optim::SimplexOptions simplex;
};

struct FitDiagnostics {
    double loss = 0.0;
    std::size_t samples = 0;
    std::size_t excluded_near = 0;
    std::size_t excluded_horizon = 0;
    double height_std_m = 0.0;
    double mean_depth_m = 0.0;
    int evaluations = 0;
    bool converged = false;
    bool at_bound = false;
    bool low_confidence = false;
    LateralGrouping grouping = LateralGrouping::FullProduct;
    std::vector<std::string> warnings;
};

struct FitResult {
    CameraParams camera;
    FitDiagnostics diagnostics;
};

/// Mean squared deviation of estimated heights from the nominal height. Infinite when any
/// sample's head ray is above the horizon under `cam`.
double calibration_loss(std::span<const CalibrationSample> samples, const CameraParams& cam,
                        double nominal_height_m,
                        LateralGrouping grouping = LateralGrouping::FullProduct);

/// Fits camera height, vertical FOV and tilt so that observed people have the nominal
/// height on average. Deterministic for a given sample order.
FitResult fit_camera_params(std::span<const CalibrationSample> samples,
                            const FitConfig& config = {});

}  // namespace socdist::geo_auto
