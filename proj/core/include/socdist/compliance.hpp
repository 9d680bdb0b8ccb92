#pragma once

#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "socdist/types.hpp"

namespace socdist::compliance {

enum class DurationMode {
    Total,       // all violating time inside the window
    LongestRun,  // longest consecutive violating run inside the window
};

struct WindowConfig {
    double span_s = 30.0;
    double high_risk_s = 5.0;
    DurationMode mode = DurationMode::Total;

    void validate() const;
};

/// Pairwise violation durations for one aggregation window.
class ComplianceWindow {
public:
    explicit ComplianceWindow(double start_ts = 0.0, WindowConfig cfg = {});

    /// Registers every id tracked in the frame and adds dt to each violating pair.
    void accumulate(std::span<const TrackId> frame_ids, std::span<const IdPair> pairs, double dt);

    /// Effective t_ij under the configured mode; 0 for pairs never seen violating.
    double duration(TrackId a, TrackId b) const;
    /// Effective durations keyed by ordered pair, clamped to the window span.
    std::map<IdPair, double> durations() const;
    /// Overwrites a duration directly (used for replay and scripted scenarios).
    void set_duration(TrackId a, TrackId b, double seconds);

    const std::set<TrackId>& person_ids() const noexcept { return ids_; }
    const WindowConfig& config() const noexcept { return cfg_; }
    double start_ts() const noexcept { return start_ts_; }
    double end_ts() const noexcept { return start_ts_ + cfg_.span_s; }

private:
    double start_ts_;
    WindowConfig cfg_;
    std::set<TrackId> ids_;
    std::map<IdPair, double> total_;
    std::map<IdPair, double> run_;
    std::map<IdPair, double> longest_;
};

struct ViolationGraph {
    std::set<TrackId> nodes;
    std::vector<IdPair> edges;  // sorted, first < second, no duplicates
};

ViolationGraph graph_from_edges(std::span<const IdPair> edges);

/// Edges are the pairs whose duration strictly exceeds the high-risk threshold.
ViolationGraph high_risk_graph(const ComplianceWindow& window);

struct Cluster {
    std::vector<TrackId> members;  // sorted
    std::map<TrackId, std::size_t> degree;
};

/// Connected components, ordered by their smallest member.
std::vector<Cluster> clusters(const ViolationGraph& graph);

struct ComplianceMetrics {
    std::size_t distinct_people = 0;
    std::size_t violation_pairs = 0;
    std::size_t high_risk_pairs = 0;
    std::size_t violators = 0;
    double violations_to_violators = 0.0;
    std::vector<std::size_t> cluster_sizes;  // components of size >= 2, descending
    std::size_t max_cluster = 0;
};

/// Cluster statistics and the edge/violator ratio derived from a graph.
ComplianceMetrics graph_metrics(const ViolationGraph& graph);

struct WindowSnapshot {
    double start_ts = 0.0;
    double span_s = 0.0;
    std::set<TrackId> ids;
    std::vector<IdPair> violating_pairs;  // t_ij > 0
    ViolationGraph graph;
    ComplianceMetrics metrics;
};

WindowSnapshot snapshot(const ComplianceWindow& window);

struct RollingMetrics {
    ComplianceMetrics metrics;
    std::size_t window_count = 0;
    double start_ts = 0.0;
    double end_ts = 0.0;
};

/// Aggregates the last ceil(horizon / span) windows. Pair counts are summed; people,
/// violators and clusters come from the union of ids and edges.
RollingMetrics rolling_metrics(std::span<const WindowSnapshot> history, double horizon_s = 300.0);

/// Splits a frame stream into consecutive fixed-span windows.
class WindowedAccumulator {
public:
    explicit WindowedAccumulator(WindowConfig cfg = {});

    /// Returns the windows closed by this frame (empty windows are emitted for gaps).
    std::vector<WindowSnapshot> add_frame(double ts, std::span<const TrackId> ids,
                                          std::span<const IdPair> pairs, double dt);
    /// Closes the open window, if any.
    std::optional<WindowSnapshot> flush();

    const std::optional<ComplianceWindow>& current() const noexcept { return current_; }

private:
    WindowConfig cfg_;
    std::optional<ComplianceWindow> current_;
    long long next_index_ = 0;
};

inline constexpr std::string_view kMetricNames[] = {
    "distinct_people", "violation_pairs", "high_risk_pairs", "violators",
    "ratio",           "clusters",        "max_cluster"};

/// Throws ConfigError for unknown metric names.
double metric_value(const ComplianceMetrics& m, std::string_view name);

struct AlertEvent {
    std::string metric;
    double value = 0.0;
    double threshold = 0.0;
    double window_start_ts = 0.0;
    double window_end_ts = 0.0;
};

/// Edge-triggered threshold alerts. A metric fires when it rises above its threshold and
/// re-arms once it drops below rearm_ratio * threshold.
class AlertMonitor {
public:
    explicit AlertMonitor(std::map<std::string, double> thresholds = {}, double rearm_ratio = 1.0);

    std::vector<AlertEvent> check(const RollingMetrics& metrics);

    const std::vector<std::string>& warnings() const noexcept { return warnings_; }

private:
    std::map<std::string, double> thresholds_;
    std::map<std::string, bool> armed_;
    double rearm_ratio_;
    std::vector<std::string> warnings_;
};

}  // namespace socdist::compliance
