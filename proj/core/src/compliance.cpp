#include "socdist/compliance.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "socdist/error.hpp"

namespace socdist::compliance {

void WindowConfig::validate() const {
    if (!(span_s > 0.0)) throw ConfigError("window span must be positive");
    if (!(high_risk_s >= 0.0)) throw ConfigError("high-risk threshold must be non-negative");
}

ComplianceWindow::ComplianceWindow(double start_ts, WindowConfig cfg)
    : start_ts_(start_ts), cfg_(cfg) {
    cfg_.validate();
}

void ComplianceWindow::accumulate(std::span<const TrackId> frame_ids,
                                  std::span<const IdPair> pairs, double dt) {
    ids_.insert(frame_ids.begin(), frame_ids.end());
    std::set<IdPair> seen;
    for (const auto& [a, b] : pairs) {
        if (a == b) continue;
        const IdPair key = ordered_pair(a, b);
        if (!seen.insert(key).second) continue;
        ids_.insert(a);
        ids_.insert(b);
        total_[key] += dt;
        double& run = run_[key];
        run += dt;
        double& best = longest_[key];
        best = std::max(best, run);
    }
    for (auto& [key, run] : run_) {
        if (!seen.contains(key)) run = 0.0;
    }
}

double ComplianceWindow::duration(TrackId a, TrackId b) const {
    const auto& src = cfg_.mode == DurationMode::Total ? total_ : longest_;
    const auto it = src.find(ordered_pair(a, b));
    return it == src.end() ? 0.0 : std::min(it->second, cfg_.span_s);
}

std::map<IdPair, double> ComplianceWindow::durations() const {
    std::map<IdPair, double> out = cfg_.mode == DurationMode::Total ? total_ : longest_;
    for (auto& [key, t] : out) t = std::min(t, cfg_.span_s);
    return out;
}

void ComplianceWindow::set_duration(TrackId a, TrackId b, double seconds) {
    const IdPair key = ordered_pair(a, b);
    ids_.insert(a);
    ids_.insert(b);
    total_[key] = seconds;
    longest_[key] = seconds;
}

ViolationGraph graph_from_edges(std::span<const IdPair> edges) {
    ViolationGraph g;
    for (const auto& [a, b] : edges) {
        if (a == b) continue;
        g.edges.push_back(ordered_pair(a, b));
        g.nodes.insert(a);
        g.nodes.insert(b);
    }
    std::sort(g.edges.begin(), g.edges.end());
    g.edges.erase(std::unique(g.edges.begin(), g.edges.end()), g.edges.end());
    return g;
}

ViolationGraph high_risk_graph(const ComplianceWindow& window) {
    std::vector<IdPair> edges;
    for (const auto& [key, t] : window.durations()) {
        if (t > window.config().high_risk_s) edges.push_back(key);
    }
    return graph_from_edges(edges);
}

std::vector<Cluster> clusters(const ViolationGraph& graph) {
    std::map<TrackId, std::vector<TrackId>> adjacency;
    for (const auto& [a, b] : graph.edges) {
        adjacency[a].push_back(b);
        adjacency[b].push_back(a);
    }
    std::set<TrackId> visited;
    std::vector<Cluster> out;
    for (const TrackId start : graph.nodes) {
        if (visited.contains(start)) continue;
        Cluster c;
        std::vector<TrackId> stack{start};
        visited.insert(start);
        while (!stack.empty()) {
            const TrackId v = stack.back();
            stack.pop_back();
            c.members.push_back(v);
            const auto it = adjacency.find(v);
            c.degree[v] = it == adjacency.end() ? 0 : it->second.size();
            if (it == adjacency.end()) continue;
            for (const TrackId w : it->second) {
                if (visited.insert(w).second) stack.push_back(w);
            }
        }
        std::sort(c.members.begin(), c.members.end());
        out.push_back(std::move(c));
    }
    return out;
}

ComplianceMetrics graph_metrics(const ViolationGraph& graph) {
    ComplianceMetrics m;
    m.high_risk_pairs = graph.edges.size();
    m.violators = graph.nodes.size();
    m.violations_to_violators =
        m.violators ? static_cast<double>(m.high_risk_pairs) / static_cast<double>(m.violators)
                    : 0.0;
    for (const auto& c : clusters(graph)) {
        if (c.members.size() >= 2) m.cluster_sizes.push_back(c.members.size());
    }
    std::sort(m.cluster_sizes.begin(), m.cluster_sizes.end(), std::greater<>());
    m.max_cluster = m.cluster_sizes.empty() ? 0 : m.cluster_sizes.front();
    return m;
}

WindowSnapshot snapshot(const ComplianceWindow& window) {
    WindowSnapshot s;
    s.start_ts = window.start_ts();
    s.span_s = window.config().span_s;
    s.ids = window.person_ids();
    for (const auto& [key, t] : window.durations()) {
        if (t > 0.0) s.violating_pairs.push_back(key);
    }
    s.graph = high_risk_graph(window);
    s.metrics = graph_metrics(s.graph);
    s.metrics.distinct_people = s.ids.size();
    s.metrics.violation_pairs = s.violating_pairs.size();
    return s;
}

RollingMetrics rolling_metrics(std::span<const WindowSnapshot> history, double horizon_s) {
    RollingMetrics r;
    if (history.empty()) return r;
    const double span = history.back().span_s;
    const auto wanted = static_cast<std::size_t>(std::ceil(horizon_s / span - 1e-9));
    const std::size_t count = std::min(history.size(), std::max<std::size_t>(wanted, 1));
    const auto recent = history.last(count);

    std::set<TrackId> ids;
    std::vector<IdPair> edges;
    std::size_t violation_pairs = 0, high_risk_pairs = 0;
    for (const auto& w : recent) {
        ids.insert(w.ids.begin(), w.ids.end());
        edges.insert(edges.end(), w.graph.edges.begin(), w.graph.edges.end());
        violation_pairs += w.metrics.violation_pairs;
        high_risk_pairs += w.metrics.high_risk_pairs;
    }
    r.metrics = graph_metrics(graph_from_edges(edges));
    r.metrics.distinct_people = ids.size();
    r.metrics.violation_pairs = violation_pairs;
    r.metrics.high_risk_pairs = high_risk_pairs;
    r.window_count = count;
    r.start_ts = recent.front().start_ts;
    r.end_ts = recent.back().start_ts + recent.back().span_s;
    return r;
}

WindowedAccumulator::WindowedAccumulator(WindowConfig cfg) : cfg_(cfg) { cfg_.validate(); }

std::vector<WindowSnapshot> WindowedAccumulator::add_frame(double ts, std::span<const TrackId> ids,
                                                           std::span<const IdPair> pairs,
                                                           double dt) {
    std::vector<WindowSnapshot> closed;
    const auto index = static_cast<long long>(std::floor(ts / cfg_.span_s));
    if (current_ && index > next_index_ - 1) {
        closed.push_back(snapshot(*current_));
        for (long long k = next_index_; k < index; ++k) {
            closed.push_back(snapshot(ComplianceWindow(static_cast<double>(k) * cfg_.span_s, cfg_)));
        }
        current_.reset();
    }
    if (!current_) {
        current_.emplace(static_cast<double>(index) * cfg_.span_s, cfg_);
        next_index_ = index + 1;
    }
    current_->accumulate(ids, pairs, dt);
    return closed;
}

std::optional<WindowSnapshot> WindowedAccumulator::flush() {
    if (!current_) return std::nullopt;
    auto s = snapshot(*current_);
    current_.reset();
    return s;
}

double metric_value(const ComplianceMetrics& m, std::string_view name) {
    if (name == "distinct_people") return static_cast<double>(m.distinct_people);
    if (name == "violation_pairs") return static_cast<double>(m.violation_pairs);
    if (name == "high_risk_pairs") return static_cast<double>(m.high_risk_pairs);
    if (name == "violators") return static_cast<double>(m.violators);
    if (name == "ratio") return m.violations_to_violators;
    if (name == "clusters") return static_cast<double>(m.cluster_sizes.size());
    if (name == "max_cluster") return static_cast<double>(m.max_cluster);
    throw ConfigError("unknown metric '" + std::string(name) + "'");
}

AlertMonitor::AlertMonitor(std::map<std::string, double> thresholds, double rearm_ratio)
    : thresholds_(std::move(thresholds)), rearm_ratio_(rearm_ratio) {
    for (const auto& [name, t] : thresholds_) {
        metric_value(ComplianceMetrics{}, name);
        armed_[name] = true;
    }
    if (thresholds_.empty()) warnings_.emplace_back("no alert thresholds configured");
}

std::vector<AlertEvent> AlertMonitor::check(const RollingMetrics& r) {
    std::vector<AlertEvent> events;
    for (const auto& [name, threshold] : thresholds_) {
        const double value = metric_value(r.metrics, name);
        bool& armed = armed_[name];
        if (value > threshold) {
            if (armed) {
                events.push_back({name, value, threshold, r.start_ts, r.end_ts});
                armed = false;
            }
        } else if (value < rearm_ratio_ * threshold) {
            armed = true;
        }
    }
    return events;
}

}  // namespace socdist::compliance
