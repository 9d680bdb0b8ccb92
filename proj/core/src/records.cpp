#include "json.hpp"
#include "socdist/pipeline.hpp"

namespace socdist::pipeline {
namespace {

using nlohmann::json;

json box_json(const BoundingBox& b) { return json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

json pairs_json(std::span<const IdPair> pairs) {
    json a = json::array();
    for (const auto& [x, y] : pairs) a.push_back(json::array({x, y}));
    return a;
}

}  // namespace

std::string overlay_json(const OverlayRecord& r) {
    json people = json::array();
    for (const auto& p : r.people) {
        json o{{"id", p.id},
               {"box", box_json(p.box)},
               {"color", p.violating ? "red" : "green"},
               {"blur", box_json(p.blur)}};
        if (p.ellipse) {
            o["ellipse"] = {{"cx", p.ellipse->center.x},
                            {"cy", p.ellipse->center.y},
                            {"semi_major", p.ellipse->semi_major_px},
                            {"semi_minor", p.ellipse->semi_minor_px}};
        }
        if (p.excluded) o["excluded"] = true;
        if (p.near_camera) o["near_camera"] = true;
        people.push_back(std::move(o));
    }
    json doc{{"frame", r.frame_index},
             {"ts", r.ts},
             {"calibrated", r.calibrated},
             {"people", people},
             {"pairs", pairs_json(r.pairs)},
             {"excluded", r.excluded}};
    return doc.dump();
}

std::string tracks_json(std::int64_t frame, double ts, std::span<const tracker::TrackOutput> tracks) {
    json arr = json::array();
    for (const auto& t : tracks) {
        arr.push_back({{"id", t.id}, {"box", box_json(t.box)}, {"conf", t.confidence}});
    }
    return json{{"frame", frame}, {"ts", ts}, {"tracks", arr}}.dump();
}

std::string metrics_json(const std::string& feed, const WindowReport& w) {
    const auto& m = w.window.metrics;
    json alerts = json::array();
    for (const auto& a : w.alerts) {
        alerts.push_back({{"metric", a.metric}, {"value", a.value}, {"threshold", a.threshold}});
    }
    json doc{{"feed", feed},
             {"window_start_ts", w.window.start_ts},
             {"span_s", w.window.span_s},
             {"distinct_people", m.distinct_people},
             {"violation_pairs", m.violation_pairs},
             {"high_risk_pairs", m.high_risk_pairs},
             {"violators", m.violators},
             {"ratio", m.violations_to_violators},
             {"clusters", m.cluster_sizes},
             {"alerts", alerts}};
    return doc.dump();
}

std::string rolling_json(const compliance::RollingMetrics& r) {
    const auto& m = r.metrics;
    json doc{{"window_count", r.window_count},
             {"start_ts", r.start_ts},
             {"end_ts", r.end_ts},
             {"distinct_people", m.distinct_people},
             {"violation_pairs", m.violation_pairs},
             {"high_risk_pairs", m.high_risk_pairs},
             {"violators", m.violators},
             {"ratio", m.violations_to_violators},
             {"clusters", m.cluster_sizes},
             {"max_cluster", m.max_cluster}};
    return doc.dump();
}

std::string alert_json(const std::string& feed, const compliance::AlertEvent& a) {
    json doc{{"feed", feed},
             {"metric", a.metric},
             {"value", a.value},
             {"threshold", a.threshold},
             {"window_start_ts", a.window_start_ts},
             {"window_end_ts", a.window_end_ts}};
    return doc.dump();
}

}  // namespace socdist::pipeline
