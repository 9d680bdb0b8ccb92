#include "socdist/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "numfmt.hpp"
#include "socdist/error.hpp"

namespace socdist::ingest {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        fields.push_back(line.substr(start, comma - start));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return fields;
}

double field_value(const std::vector<std::string_view>& fields, std::size_t i, std::size_t line,
                   const char* name) {
    const auto v = detail::parse_double(fields[i]);
    if (!v || !std::isfinite(*v)) {
        throw ParseError(line, std::string("field '") + name + "' is not numeric: '" +
                                   std::string(detail::trim(fields[i])) + "'");
    }
    return *v;
}

double normalize_confidence(double conf) {
    if (conf == -1.0) return 1.0;
    return std::clamp(conf, 0.0, 1.0);
}

bool is_blank_or_comment(std::string_view line) {
    const auto t = detail::trim(line);
    return t.empty() || t.front() == '#';
}

}  // namespace

ParsedRecord parse_detection_record(std::string_view line, const FrameGeometry& geometry,
                                    std::size_t line_number) {
    line = detail::trim(line);
    const auto fields = split_fields(line);
    if (fields.size() < 7) {
        throw ParseError(line_number, "expected at least 7 comma-separated fields, got " +
                                          std::to_string(fields.size()));
    }
    const double frame = field_value(fields, 0, line_number, "frame");
    const double id = field_value(fields, 1, line_number, "id");
    const double left = field_value(fields, 2, line_number, "bb_left");
    const double top = field_value(fields, 3, line_number, "bb_top");
    const double width = field_value(fields, 4, line_number, "bb_width");
    const double height = field_value(fields, 5, line_number, "bb_height");
    const double conf = field_value(fields, 6, line_number, "conf");

    if (frame < 1.0 || frame != std::floor(frame)) {
        throw ParseError(line_number, "frame must be a positive integer");
    }
    if (width <= 0.0 || height <= 0.0) {
        throw RejectedRecordError(line_number, "non-positive box width or height");
    }

    ParsedRecord record;
    record.frame_index = static_cast<std::int64_t>(frame) - 1;
    record.id = static_cast<TrackId>(id);
    const BoundingBox raw{left, top, left + width, top + height};
    record.detection.box = geometry.valid() ? raw.clamped(geometry) : raw;
    if (!record.detection.box.valid()) {
        throw RejectedRecordError(line_number, "box lies outside the frame");
    }
    record.detection.confidence = normalize_confidence(conf);
    return record;
}

std::string format_detection_record(std::int64_t frame_index, const Detection& detection,
                                    TrackId id) {
    const auto& b = detection.box;
    std::string out = std::to_string(frame_index + 1);
    out += ',';
    out += std::to_string(id);
    for (double v : {b.x_min, b.y_min, b.width(), b.height(), detection.confidence}) {
        out += ',';
        out += detail::format_double(v);
    }
    out += ",-1,-1,-1";
    return out;
}

FrameDetections validate_frame(const FrameDetections& frame, const FrameGeometry& geometry,
                               const FilterConfig& config) {
    FrameDetections out{frame.frame_index, frame.timestamp, {}};
    out.detections.reserve(frame.detections.size());
    for (const auto& det : frame.detections) {
        Detection d = det;
        if (geometry.valid()) d.box = d.box.clamped(geometry);
        if (config.strict) {
            if (d.box.area() < config.min_area_px2) continue;
            if (d.box.width() <= 0.0) continue;
            const double aspect = d.box.height() / d.box.width();
            if (aspect < config.min_aspect || aspect > config.max_aspect) continue;
        }
        out.detections.push_back(d);
    }
    return out;
}

FrameDetections normalize_frame(FrameDetections frame, const FrameGeometry& geometry,
                                const IngestConfig& config) {
    std::erase_if(frame.detections, [&](const Detection& d) {
        return d.confidence < config.confidence_floor;
    });
    for (auto& d : frame.detections) {
        if (geometry.valid()) d.box = d.box.clamped(geometry);
    }
    std::erase_if(frame.detections, [](const Detection& d) { return !d.box.valid(); });
    return validate_frame(frame, geometry, config.filter);
}

std::vector<FrameDetections> read_detection_csv(std::istream& in, const FrameGeometry& geometry,
                                                const IngestConfig& config) {
    if (!(config.fps > 0.0)) throw ConfigError("fps must be positive");
    std::map<std::int64_t, std::vector<Detection>> by_frame;
    std::string line;
    std::size_t line_number = 0;
    std::int64_t max_frame = -1;
    while (std::getline(in, line)) {
        ++line_number;
        if (is_blank_or_comment(line)) continue;
        const auto rec = parse_detection_record(line, geometry, line_number);
        by_frame[rec.frame_index].push_back(rec.detection);
        max_frame = std::max(max_frame, rec.frame_index);
    }
    std::vector<FrameDetections> frames;
    frames.reserve(static_cast<std::size_t>(max_frame + 1));
    for (std::int64_t f = 0; f <= max_frame; ++f) {
        FrameDetections fd{f, static_cast<double>(f) / config.fps, {}};
        if (const auto it = by_frame.find(f); it != by_frame.end()) {
            fd.detections = std::move(it->second);
        }
        frames.push_back(normalize_frame(std::move(fd), geometry, config));
    }
    return frames;
}

IdentifiedSequence read_identified_csv(std::istream& in) {
    IdentifiedSequence seq;
    std::string line;
    std::size_t line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        if (is_blank_or_comment(line)) continue;
        const auto fields = split_fields(detail::trim(line));
        if (fields.size() < 6) {
            throw ParseError(line_number, "expected at least 6 comma-separated fields, got " +
                                              std::to_string(fields.size()));
        }
        const double frame = field_value(fields, 0, line_number, "frame");
        const double id = field_value(fields, 1, line_number, "id");
        const double left = field_value(fields, 2, line_number, "bb_left");
        const double top = field_value(fields, 3, line_number, "bb_top");
        const double width = field_value(fields, 4, line_number, "bb_width");
        const double height = field_value(fields, 5, line_number, "bb_height");
        if (frame < 1.0 || frame != std::floor(frame)) {
            throw ParseError(line_number, "frame must be a positive integer");
        }
        if (width <= 0.0 || height <= 0.0) {
            throw RejectedRecordError(line_number, "non-positive box width or height");
        }
        if (fields.size() >= 7) {
            const auto flag = detail::parse_double(fields[6]);
            if (flag && *flag == 0.0) continue;
        }
        const auto f = static_cast<std::size_t>(frame) - 1;
        if (seq.size() <= f) seq.resize(f + 1);
        seq[f].push_back({static_cast<TrackId>(id), {left, top, left + width, top + height}});
    }
    return seq;
}

FrameDetections parse_frame_json(std::string_view line, const FrameGeometry& geometry,
                                 const IngestConfig& config, std::size_t line_number) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(line_number, std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("frame") || !doc["frame"].is_number_integer()) {
        throw ParseError(line_number, "object with integer 'frame' required");
    }
    FrameDetections fd;
    fd.frame_index = doc["frame"].get<std::int64_t>();
    if (fd.frame_index < 0) throw ParseError(line_number, "'frame' must be non-negative");
    if (doc.contains("ts")) {
        if (!doc["ts"].is_number()) throw ParseError(line_number, "'ts' must be a number");
        fd.timestamp = doc["ts"].get<double>();
        if (fd.timestamp < 0.0) throw ParseError(line_number, "'ts' must be non-negative");
    } else {
        fd.timestamp = static_cast<double>(fd.frame_index) / config.fps;
    }
    if (doc.contains("boxes")) {
        const auto& boxes = doc["boxes"];
        if (!boxes.is_array()) throw ParseError(line_number, "'boxes' must be an array");
        for (const auto& b : boxes) {
            if (!b.is_array() || b.size() < 4 || b.size() > 5) {
                throw ParseError(line_number, "each box must be [x_min,y_min,x_max,y_max(,conf)]");
            }
            for (const auto& v : b) {
                if (!v.is_number()) throw ParseError(line_number, "box entries must be numeric");
            }
            Detection d;
            d.box = {b[0].get<double>(), b[1].get<double>(), b[2].get<double>(),
                     b[3].get<double>()};
            if (!d.box.valid()) {
                throw RejectedRecordError(line_number, "box has non-positive width or height");
            }
            d.confidence = b.size() == 5 ? normalize_confidence(b[4].get<double>()) : 1.0;
            fd.detections.push_back(d);
        }
    }
    return normalize_frame(std::move(fd), geometry, config);
}

std::string format_frame_json(const FrameDetections& frame) {
    nlohmann::json boxes = nlohmann::json::array();
    for (const auto& d : frame.detections) {
        boxes.push_back({d.box.x_min, d.box.y_min, d.box.x_max, d.box.y_max, d.confidence});
    }
    nlohmann::json doc{{"frame", frame.frame_index}, {"ts", frame.timestamp}, {"boxes", boxes}};
    return doc.dump();
}

void StreamSequencer::check(const FrameDetections& frame) {
    if (last_index_ && frame.frame_index <= *last_index_) {
        throw SequenceError("frame index " + std::to_string(frame.frame_index) +
                            " does not follow " + std::to_string(*last_index_));
    }
    if (last_index_ && frame.timestamp < last_ts_) {
        throw SequenceError("timestamp decreased at frame " + std::to_string(frame.frame_index));
    }
    last_index_ = frame.frame_index;
    last_ts_ = frame.timestamp;
}

}  // namespace socdist::ingest
