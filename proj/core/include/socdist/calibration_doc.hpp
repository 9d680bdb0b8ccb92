#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "socdist/camera_fit.hpp"
#include "socdist/error.hpp"
#include "socdist/homography.hpp"

namespace socdist::calib {

struct ToolCalibration {
    geo_tool::HomographyCalibration homography;
    FrameGeometry frame;
    std::vector<std::string> warnings;
};

struct AutoCalibration {
    geo_auto::CameraParams camera;
    double radius_m = 1.0;
    FrameGeometry frame;
    geo_auto::LateralGrouping grouping = geo_auto::LateralGrouping::FullProduct;
    std::optional<geo_auto::FitDiagnostics> diagnostics;
};

using Calibration = std::variant<ToolCalibration, AutoCalibration>;

std::string_view mode_of(const Calibration& c) noexcept;

struct FieldError {
    std::string field;
    std::string message;
};

/// A calibration document failed validation; carries one entry per offending field.
class DocumentError : public Error {
public:
    explicit DocumentError(std::vector<FieldError> fields);
    DocumentError(std::string field, std::string message);
    const std::vector<FieldError>& fields() const noexcept { return fields_; }

private:
    std::vector<FieldError> fields_;
};

/// Parses and validates a "tool" or "auto" calibration document.
/// For tool documents the matrix is recomputed from "quad"/"rect" when a quad is given (a
/// supplied matrix must then agree within 1 px at the quad corners); the scale comes from
/// "scale_px_per_m" or, when absent, from an optional "references" list.
Calibration parse_calibration(std::string_view json_text);

std::string serialize_calibration(const Calibration& c);

AutoCalibration auto_from_fit(const geo_auto::FitResult& fit, const FrameGeometry& frame,
                              double radius_m = 1.0);

}  // namespace socdist::calib
