#include "socdist/calibration_doc.hpp"

#include <cmath>

#include "json.hpp"

namespace socdist::calib {
namespace {

using nlohmann::json;

std::string join_messages(const std::vector<FieldError>& fields) {
    std::string s = "invalid calibration document";
    for (const auto& f : fields) s += "; " + f.field + ": " + f.message;
    return s;
}

class Collector {
public:
    void add(std::string field, std::string message) {
        errors_.push_back({std::move(field), std::move(message)});
    }
    void raise_if_any() const {
        if (!errors_.empty()) throw DocumentError(errors_);
    }
    bool empty() const noexcept { return errors_.empty(); }

private:
    std::vector<FieldError> errors_;
};

std::optional<double> number(const json& doc, const char* key, Collector& err, bool required) {
    if (!doc.contains(key)) {
        if (required) err.add(key, "missing");
        return std::nullopt;
    }
    if (!doc[key].is_number()) {
        err.add(key, "must be a number");
        return std::nullopt;
    }
    return doc[key].get<double>();
}

std::optional<Point2> point(const json& v) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        return std::nullopt;
    }
    return Point2{v[0].get<double>(), v[1].get<double>()};
}

std::optional<geo_tool::Quad> quad(const json& doc, const char* key, Collector& err) {
    if (!doc.contains(key)) return std::nullopt;
    const auto& v = doc[key];
    if (!v.is_array() || v.size() != 4) {
        err.add(key, "must be an array of four [x,y] points");
        return std::nullopt;
    }
    geo_tool::Quad q;
    for (std::size_t i = 0; i < 4; ++i) {
        const auto p = point(v[i]);
        if (!p) {
            err.add(key, "point " + std::to_string(i) + " must be [x,y]");
            return std::nullopt;
        }
        q[i] = *p;
    }
    return q;
}

FrameGeometry frame(const json& doc, Collector& err) {
    if (!doc.contains("frame") || !doc["frame"].is_object()) {
        err.add("frame", "object {\"w\":int,\"h\":int} required");
        return {};
    }
    const auto& f = doc["frame"];
    if (!f.contains("w") || !f.contains("h") || !f["w"].is_number_integer() ||
        !f["h"].is_number_integer()) {
        err.add("frame", "w and h must be integers");
        return {};
    }
    FrameGeometry g{f["w"].get<int>(), f["h"].get<int>()};
    if (!g.valid()) err.add("frame", "w and h must be positive");
    return g;
}

json point_json(const Point2& p) { return json::array({p.x, p.y}); }

json quad_json(const geo_tool::Quad& q) {
    json a = json::array();
    for (const auto& p : q) a.push_back(point_json(p));
    return a;
}

ToolCalibration parse_tool(const json& doc) {
    Collector err;
    const FrameGeometry fr = frame(doc, err);
    const auto q = quad(doc, "quad", err);
    const auto rect = quad(doc, "rect", err);
    const auto scale = number(doc, "scale_px_per_m", err, false);
    const double threshold = number(doc, "threshold_m", err, false).value_or(2.0);
    if (!(threshold > 0.0)) err.add("threshold_m", "must be positive");

    std::optional<geo_tool::Matrix3> matrix;
    if (doc.contains("matrix")) {
        const auto& m = doc["matrix"];
        bool ok = m.is_array() && m.size() == 3;
        geo_tool::Matrix3 mm;
        for (std::size_t r = 0; ok && r < 3; ++r) {
            ok = m[r].is_array() && m[r].size() == 3;
            for (std::size_t c = 0; ok && c < 3; ++c) {
                ok = m[r][c].is_number();
                if (ok) mm(static_cast<int>(r), static_cast<int>(c)) = m[r][c].get<double>();
            }
        }
        if (ok) {
            matrix = mm;
        } else {
            err.add("matrix", "must be a 3x3 array of numbers");
        }
    }

    std::vector<geo_tool::ReferenceSegment> refs;
    if (doc.contains("references")) {
        const auto& r = doc["references"];
        if (!r.is_array()) {
            err.add("references", "must be an array");
        } else {
            for (std::size_t i = 0; i < r.size(); ++i) {
                const auto& e = r[i];
                const auto a = e.is_object() && e.contains("a") ? point(e["a"]) : std::nullopt;
                const auto b = e.is_object() && e.contains("b") ? point(e["b"]) : std::nullopt;
                if (!a || !b || !e.contains("length_m") || !e["length_m"].is_number()) {
                    err.add("references[" + std::to_string(i) + "]",
                            "expected {\"a\":[x,y],\"b\":[x,y],\"length_m\":float}");
                    continue;
                }
                refs.push_back({*a, *b, e["length_m"].get<double>()});
            }
        }
    }
    if (!q && !matrix) err.add("quad", "either quad or matrix is required");
    if (!scale && refs.empty()) err.add("scale_px_per_m", "missing (and no references given)");
    err.raise_if_any();

    std::vector<std::string> warnings;
    std::optional<geo_tool::HomographyCalibration> cal;
    try {
        if (q) {
            cal = scale ? geo_tool::HomographyCalibration::from_quad(*q, rect, *scale, threshold)
                        : geo_tool::HomographyCalibration::from_quad(*q, rect, refs, threshold,
                                                                     &warnings);
            if (matrix) {
                for (const auto& corner : *q) {
                    const Point2 a = geo_tool::warp_point(cal->matrix(), corner);
                    const Point2 b = geo_tool::warp_point(*matrix, corner);
                    if (distance(a, b) > 1.0) {
                        err.add("matrix", "disagrees with the quad/rect correspondence by more "
                                          "than 1 px");
                        break;
                    }
                }
            }
        } else {
            const double s = scale ? *scale
                                   : geo_tool::scale_from_references(*matrix, refs).px_per_m;
            cal.emplace(*matrix, s, threshold);
        }
    } catch (const SingularSystemError& e) {
        err.add("quad", e.what());
    } catch (const HorizonError& e) {
        err.add("references", e.what());
    } catch (const ConfigError& e) {
        const std::string what = e.what();
        const char* field = what.find("rectangle") != std::string::npos ? "rect"
                            : what.find("scale") != std::string::npos ? "scale_px_per_m"
                            : what.find("matrix") != std::string::npos ? "matrix"
                                                                        : "references";
        err.add(field, what);
    }
    err.raise_if_any();
    return {*cal, fr, std::move(warnings)};
}

AutoCalibration parse_auto(const json& doc) {
    Collector err;
    AutoCalibration a;
    a.frame = frame(doc, err);
    const auto x0 = number(doc, "x0_m", err, true);
    const auto x1 = number(doc, "x1_rad", err, true);
    const auto x2 = number(doc, "x2_rad", err, true);
    a.radius_m = number(doc, "radius_m", err, false).value_or(1.0);
    if (!(a.radius_m > 0.0)) err.add("radius_m", "must be positive");
    if (x0 && !(*x0 > 0.0)) err.add("x0_m", "camera height must be positive");
    if (x1 && !(*x1 > 0.0 && *x1 < geo_auto::kPi)) err.add("x1_rad", "FOV must be in (0, pi)");
    if (x2 && !(*x2 > 0.0 && *x2 < geo_auto::kPi / 2)) {
        err.add("x2_rad", "tilt must be in (0, pi/2)");
    }
    if (doc.contains("diagnostics")) {
        const auto& d = doc["diagnostics"];
        if (!d.is_object()) {
            err.add("diagnostics", "must be an object");
        } else {
            geo_auto::FitDiagnostics diag;
            diag.loss = d.value("loss", 0.0);
            diag.samples = d.value("samples", std::size_t{0});
            diag.height_std_m = d.value("height_std_m", 0.0);
            if (d.contains("warnings") && d["warnings"].is_array()) {
                for (const auto& w : d["warnings"]) {
                    if (w.is_string()) diag.warnings.push_back(w.get<std::string>());
                }
            }
            if (d.value("grouping", std::string("full_product")) == "offset_only") {
                diag.grouping = geo_auto::LateralGrouping::OffsetOnly;
            }
            a.grouping = diag.grouping;
            a.diagnostics = std::move(diag);
        }
    }
    err.raise_if_any();
    a.camera = {*x0, *x1, *x2};
    return a;
}

}  // namespace

DocumentError::DocumentError(std::vector<FieldError> fields)
    : Error(join_messages(fields)), fields_(std::move(fields)) {}

DocumentError::DocumentError(std::string field, std::string message)
    : DocumentError(std::vector<FieldError>{{std::move(field), std::move(message)}}) {}

std::string_view mode_of(const Calibration& c) noexcept {
    return std::holds_alternative<ToolCalibration>(c) ? "tool" : "auto";
}

Calibration parse_calibration(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DocumentError("$", std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw DocumentError("$", "document must be a JSON object");
    if (!doc.contains("mode") || !doc["mode"].is_string()) {
        throw DocumentError("mode", "must be \"tool\" or \"auto\"");
    }
    const auto mode = doc["mode"].get<std::string>();
    if (mode == "tool") return parse_tool(doc);
    if (mode == "auto") return parse_auto(doc);
    throw DocumentError("mode", "must be \"tool\" or \"auto\", got \"" + mode + "\"");
}

std::string serialize_calibration(const Calibration& c) {
    json doc;
    if (const auto* t = std::get_if<ToolCalibration>(&c)) {
        const auto& h = t->homography;
        doc["mode"] = "tool";
        if (h.quad()) doc["quad"] = quad_json(*h.quad());
        if (h.rect()) doc["rect"] = quad_json(*h.rect());
        json m = json::array();
        for (int r = 0; r < 3; ++r) {
            m.push_back(json::array({h.matrix()(r, 0), h.matrix()(r, 1), h.matrix()(r, 2)}));
        }
        doc["matrix"] = m;
        doc["scale_px_per_m"] = h.px_per_m();
        doc["threshold_m"] = h.threshold_m();
        doc["frame"] = {{"w", t->frame.width}, {"h", t->frame.height}};
        if (!t->warnings.empty()) doc["warnings"] = t->warnings;
    } else {
        const auto& a = std::get<AutoCalibration>(c);
        doc["mode"] = "auto";
        doc["x0_m"] = a.camera.height_m;
        doc["x1_rad"] = a.camera.vfov_rad;
        doc["x2_rad"] = a.camera.tilt_rad;
        doc["radius_m"] = a.radius_m;
        doc["frame"] = {{"w", a.frame.width}, {"h", a.frame.height}};
        if (a.diagnostics) {
            const auto& d = *a.diagnostics;
            doc["diagnostics"] = {{"loss", d.loss},
                                  {"samples", d.samples},
                                  {"height_std_m", d.height_std_m},
                                  {"warnings", d.warnings},
                                  {"grouping", geo_auto::to_string(d.grouping)},
                                  {"evaluations", d.evaluations},
                                  {"converged", d.converged},
                                  {"at_bound", d.at_bound},
                                  {"low_confidence", d.low_confidence},
                                  {"excluded_near", d.excluded_near},
                                  {"mean_depth_m", d.mean_depth_m}};
        }
    }
    return doc.dump();
}

AutoCalibration auto_from_fit(const geo_auto::FitResult& fit, const FrameGeometry& frame,
                              double radius_m) {
    return {fit.camera, radius_m, frame, fit.diagnostics.grouping, fit.diagnostics};
}

}  // namespace socdist::calib
