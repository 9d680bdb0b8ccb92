#include "socdist/mot_eval.hpp"

#include <algorithm>
#include <map>
#include <tuple>
#include <vector>

#include "socdist/error.hpp"
#include "socdist/tracker.hpp"

namespace socdist::tracker {

MotMetrics evaluate_mot(const ingest::IdentifiedSequence& gt,
                        const ingest::IdentifiedSequence& hyp, double iou_match) {
    MotMetrics m;
    const std::size_t frames = std::max(gt.size(), hyp.size());
    static const std::vector<ingest::IdentifiedBox> kEmpty;

    std::map<TrackId, TrackId> previous;     // gt id -> hyp id matched in the previous frame
    std::map<TrackId, TrackId> last_match;   // gt id -> most recent hyp id ever matched
    std::map<TrackId, std::size_t> present;  // gt id -> frames present
    std::map<TrackId, std::size_t> covered;  // gt id -> frames matched
    double iou_sum = 0.0;

    for (std::size_t f = 0; f < frames; ++f) {
        const auto& g = f < gt.size() ? gt[f] : kEmpty;
        const auto& h = f < hyp.size() ? hyp[f] : kEmpty;
        m.gt_total += g.size();
        for (const auto& o : g) ++present[o.id];

        std::vector<bool> g_used(g.size(), false), h_used(h.size(), false);
        std::vector<std::tuple<std::size_t, std::size_t, double>> matched;

        for (std::size_t gi = 0; gi < g.size(); ++gi) {
            const auto it = previous.find(g[gi].id);
            if (it == previous.end()) continue;
            for (std::size_t hi = 0; hi < h.size(); ++hi) {
                if (h_used[hi] || h[hi].id != it->second) continue;
                const double score = iou(g[gi].box, h[hi].box);
                if (score >= iou_match) {
                    g_used[gi] = h_used[hi] = true;
                    matched.emplace_back(gi, hi, score);
                }
                break;
            }
        }

        std::vector<std::tuple<double, std::size_t, std::size_t>> candidates;
        for (std::size_t gi = 0; gi < g.size(); ++gi) {
            if (g_used[gi]) continue;
            for (std::size_t hi = 0; hi < h.size(); ++hi) {
                if (h_used[hi]) continue;
                const double score = iou(g[gi].box, h[hi].box);
                if (score >= iou_match) candidates.emplace_back(score, gi, hi);
            }
        }
        std::stable_sort(candidates.begin(), candidates.end(), [](const auto& a, const auto& b) {
            return std::get<0>(a) > std::get<0>(b);
        });
        for (const auto& [score, gi, hi] : candidates) {
            if (g_used[gi] || h_used[hi]) continue;
            g_used[gi] = h_used[hi] = true;
            matched.emplace_back(gi, hi, score);
        }

        previous.clear();
        for (const auto& [gi, hi, score] : matched) {
            const TrackId gid = g[gi].id;
            const TrackId hid = h[hi].id;
            if (const auto it = last_match.find(gid); it != last_match.end() && it->second != hid) {
                ++m.id_switches;
            }
            last_match[gid] = hid;
            previous[gid] = hid;
            ++covered[gid];
            iou_sum += score;
        }
        m.matches += matched.size();
        m.misses += g.size() - matched.size();
        m.false_positives += h.size() - matched.size();
    }

    if (m.gt_total == 0) throw Error("MOTA is undefined for empty ground truth");

    m.mota = 1.0 - static_cast<double>(m.misses + m.false_positives + m.id_switches) /
                       static_cast<double>(m.gt_total);
    m.motp = m.matches ? iou_sum / static_cast<double>(m.matches) : 0.0;
    m.recall = static_cast<double>(m.matches) / static_cast<double>(m.gt_total);
    const std::size_t hyp_total = m.matches + m.false_positives;
    m.precision = hyp_total ? static_cast<double>(m.matches) / static_cast<double>(hyp_total) : 0.0;

    m.trajectories = present.size();
    for (const auto& [id, n] : present) {
        const auto it = covered.find(id);
        const double ratio = it == covered.end() ? 0.0 : static_cast<double>(it->second) / n;
        if (ratio >= 0.8) {
            ++m.mostly_tracked;
        } else if (ratio < 0.2) {
            ++m.mostly_lost;
        } else {
            ++m.partially_tracked;
        }
    }
    return m;
}

}  // namespace socdist::tracker
