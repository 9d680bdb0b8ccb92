#pragma once

#include <cstddef>
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socdist/types.hpp"

namespace socdist::ingest {

struct ParsedRecord {
    std::int64_t frame_index = 0;  // 0-based
    TrackId id = -1;               // -1 for plain detections
    Detection detection;
};

/// Parse one MOT-challenge style line: frame,id,left,top,width,height,conf[,...].
/// The box is clamped to `geometry`; a confidence of -1 means "unscored" and maps to 1.
ParsedRecord parse_detection_record(std::string_view line, const FrameGeometry& geometry,
                                    std::size_t line_number = 1);

/// Inverse of parse_detection_record (shortest round-trip number formatting).
std::string format_detection_record(std::int64_t frame_index, const Detection& detection,
                                    TrackId id = -1);

struct FilterConfig {
    double min_area_px2 = 4.0;
    double min_aspect = 1.0;  // height / width
    double max_aspect = 6.0;
    bool strict = false;
};

/// Drops implausible boxes in strict mode. Idempotent.
FrameDetections validate_frame(const FrameDetections& frame, const FrameGeometry& geometry,
                               const FilterConfig& config = {});

struct IngestConfig {
    double fps = 25.0;
    double confidence_floor = 0.3;
    FilterConfig filter;
};

/// Read a whole detection CSV (LF or CRLF). Frames are returned densely from 0 to the
/// largest frame seen, so frames without detections appear as empty entries.
std::vector<FrameDetections> read_detection_csv(std::istream& in, const FrameGeometry& geometry,
                                                const IngestConfig& config = {});

/// Identified boxes per frame, e.g. MOT ground truth or tracker hypotheses.
struct IdentifiedBox {
    TrackId id = 0;
    BoundingBox box;
};
using IdentifiedSequence = std::vector<std::vector<IdentifiedBox>>;

/// Read a MOT gt/hypothesis CSV. Rows with a conf column of 0 are ignored-region markers
/// in the gt convention and are skipped. No clamping is applied.
IdentifiedSequence read_identified_csv(std::istream& in);

/// Parse one live-mode JSON line: {"frame":int,"ts":float,"boxes":[[x0,y0,x1,y1,conf],...]}.
/// A missing "ts" is synthesized from fps.
FrameDetections parse_frame_json(std::string_view line, const FrameGeometry& geometry,
                                 const IngestConfig& config = {}, std::size_t line_number = 1);

std::string format_frame_json(const FrameDetections& frame);

/// Applies the confidence floor, box clamping and the validation filter.
FrameDetections normalize_frame(FrameDetections frame, const FrameGeometry& geometry,
                                const IngestConfig& config);

/// Enforces strictly increasing frame indices and non-decreasing timestamps.
class StreamSequencer {
public:
    void check(const FrameDetections& frame);

private:
    std::optional<std::int64_t> last_index_;
    double last_ts_ = 0.0;
};

}  // namespace socdist::ingest
