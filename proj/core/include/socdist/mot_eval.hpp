#pragma once

#include <cstddef>

#include "socdist/ingest.hpp"

namespace socdist::tracker {

struct MotMetrics {
    double precision = 0.0;
    double recall = 0.0;
    double mota = 0.0;
    double motp = 0.0;  // mean IOU over matched pairs
    std::size_t mostly_tracked = 0;
    std::size_t partially_tracked = 0;
    std::size_t mostly_lost = 0;

    std::size_t gt_total = 0;
    std::size_t matches = 0;
    std::size_t false_positives = 0;
    std::size_t misses = 0;
    std::size_t id_switches = 0;
    std::size_t trajectories = 0;
};

/// CLEAR-MOT accounting. Per frame, correspondences from the previous frame are kept while
/// their IOU stays >= iou_match; the remaining pairs are matched greedily by descending IOU.
/// Trajectories covered >= 80% are mostly tracked, < 20% mostly lost.
/// Throws Error when the ground truth holds no objects.
MotMetrics evaluate_mot(const ingest::IdentifiedSequence& gt,
                        const ingest::IdentifiedSequence& hyp, double iou_match = 0.5);

}  // namespace socdist::tracker
