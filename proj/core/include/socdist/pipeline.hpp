#pragma once

#include <atomic>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "socdist/calibration_doc.hpp"
#include "socdist/compliance.hpp"
#include "socdist/ingest.hpp"
#include "socdist/tracker.hpp"

namespace socdist::pipeline {

// ---------------------------------------------------------------------------------------
// Capacity planning

struct CapacityInputs {
    double aip = 0.0;           // frames/s one algorithm instance processes
    double cpu_cores = 0.0;
    double gpu_memory_gb = 0.0;
    double sef = 0.0;           // frames/s each streaming endpoint needs
};

/// floor(AIP * min(cores, GPU GB) / SEF). Throws ConfigError on non-positive input.
std::int64_t capacity_estimate(const CapacityInputs& c);

// ---------------------------------------------------------------------------------------
// Bounded queue between stages

enum class OverflowPolicy { Block, DropOldest };

template <typename T>
class BoundedQueue {
public:
    BoundedQueue(std::size_t capacity, OverflowPolicy policy)
        : capacity_(capacity ? capacity : 1), policy_(policy) {}

    /// False once the queue has been closed.
    bool push(T item) {
        std::unique_lock lock(mutex_);
        if (policy_ == OverflowPolicy::Block) {
            not_full_.wait(lock, [&] { return closed_ || items_.size() < capacity_; });
        } else if (items_.size() >= capacity_) {
            items_.pop_front();
            ++dropped_;
        }
        if (closed_) return false;
        items_.push_back(std::move(item));
        not_empty_.notify_one();
        return true;
    }

    /// Blocks until an item is available; nullopt once closed and drained.
    std::optional<T> pop() {
        std::unique_lock lock(mutex_);
        not_empty_.wait(lock, [&] { return closed_ || !items_.empty(); });
        if (items_.empty()) return std::nullopt;
        T item = std::move(items_.front());
        items_.pop_front();
        not_full_.notify_one();
        return item;
    }

    void close() {
        std::lock_guard lock(mutex_);
        closed_ = true;
        not_empty_.notify_all();
        not_full_.notify_all();
    }

    std::uint64_t dropped() const {
        std::lock_guard lock(mutex_);
        return dropped_;
    }

private:
    std::size_t capacity_;
    OverflowPolicy policy_;
    mutable std::mutex mutex_;
    std::condition_variable not_empty_;
    std::condition_variable not_full_;
    std::deque<T> items_;
    std::uint64_t dropped_ = 0;
    bool closed_ = false;
};

// ---------------------------------------------------------------------------------------
// Configuration

struct AlertConfig {
    std::map<std::string, double> thresholds;
    double rearm_ratio = 1.0;
    std::string hook;  // command run once per alert with the alert JSON as its argument
};

struct AutoFitSettings {
    bool enabled = false;
    geo_auto::FitConfig fit;
    double radius_m = 1.0;
};

struct FeedConfig {
    std::string id;
    std::string source;  // CSV or JSON-lines path, "-" for stdin, "unix:<path>" for a socket
    double fps = 25.0;
    FrameGeometry geometry;
    std::optional<std::string> calibration_json;  // inline document text
    std::optional<std::filesystem::path> calibration_path;
    std::optional<std::string> calibration_mode;  // expected "mode" of the document
    std::optional<std::filesystem::path> still_frame;
    AlertConfig alerts;
    AutoFitSettings autofit;

    bool live() const;
    void validate() const;
};

struct EngineConfig {
    ingest::IngestConfig ingest;
    tracker::TrackerConfig tracker;
    compliance::WindowConfig window;
    double horizon_s = 300.0;
    double blur_fraction = 0.2;
    std::size_t queue_capacity = 64;
};

struct AppConfig {
    std::vector<FeedConfig> feeds;
    EngineConfig engine;
    std::filesystem::path output_dir = "out";
};

/// Parses the JSON application config. Relative paths resolve against `base_dir`;
/// "calibration" may be an inline object or a path to a document.
AppConfig parse_app_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
AppConfig load_app_config(const std::filesystem::path& path);

// ---------------------------------------------------------------------------------------
// Per-frame processing

struct PersonOverlay {
    TrackId id = 0;
    BoundingBox box;
    bool violating = false;
    BoundingBox blur;
    std::optional<geo_auto::ProximityEllipse> ellipse;
    bool excluded = false;  // feet beyond the horizon, no distance test
    bool near_camera = false;  // auto mode: closer than the calibration minimum depth
};

struct OverlayRecord {
    std::int64_t frame_index = 0;
    double ts = 0.0;
    std::vector<PersonOverlay> people;
    std::vector<IdPair> pairs;
    std::size_t excluded = 0;
    bool calibrated = false;
};

struct ViolationStage {
    std::vector<IndexPair> pairs;
    std::vector<bool> violating;
    std::vector<std::optional<geo_auto::ProximityEllipse>> ellipses;
    std::vector<bool> excluded;
    std::vector<bool> near_camera;
    std::size_t excluded_count = 0;
};

/// Distance test for one frame under either calibration mode.
ViolationStage evaluate_violations(const calib::Calibration& cal, std::span<const BoundingBox> boxes,
                                   const FrameGeometry& geometry, double near_depth_m = 2.0);

/// Top `fraction` of the box (head zone).
BoundingBox blur_region(const BoundingBox& box, double fraction);

struct WindowReport {
    compliance::WindowSnapshot window;
    compliance::RollingMetrics rolling;
    std::vector<compliance::AlertEvent> alerts;
};

struct FrameResult {
    OverlayRecord overlay;
    std::vector<tracker::TrackOutput> tracks;
    std::vector<WindowReport> windows;
};

/// Deterministic single-feed engine: tracking, distance test, compliance windows, alerts.
class FeedProcessor {
public:
    FeedProcessor(const FeedConfig& feed, const EngineConfig& engine,
                  std::shared_ptr<const calib::Calibration> calibration);

    FrameResult process(const FrameDetections& frame);
    std::vector<WindowReport> finish();

    /// Takes effect from the next processed frame.
    void set_calibration(std::shared_ptr<const calib::Calibration> calibration);
    std::shared_ptr<const calib::Calibration> calibration() const;

    const std::vector<compliance::WindowSnapshot>& history() const noexcept { return history_; }

private:
    std::vector<WindowReport> report(std::vector<compliance::WindowSnapshot> closed);
    void maybe_autofit(const FrameDetections& frame);

    FeedConfig feed_;
    EngineConfig engine_;
    tracker::MultiTracker tracker_;
    compliance::WindowedAccumulator windows_;
    compliance::AlertMonitor alerts_;
    std::vector<compliance::WindowSnapshot> history_;
    mutable std::mutex cal_mutex_;
    std::shared_ptr<const calib::Calibration> calibration_;
    std::vector<geo_auto::CalibrationSample> fit_samples_;
    std::future<geo_auto::FitResult> pending_fit_;
    std::size_t next_fit_at_ = 0;
    bool fit_done_ = false;
};

// ---------------------------------------------------------------------------------------
// JSON-lines records

std::string overlay_json(const OverlayRecord& r);
std::string tracks_json(std::int64_t frame, double ts, std::span<const tracker::TrackOutput> tracks);
std::string metrics_json(const std::string& feed, const WindowReport& w);
std::string rolling_json(const compliance::RollingMetrics& r);
std::string alert_json(const std::string& feed, const compliance::AlertEvent& a);

// ---------------------------------------------------------------------------------------
// Threaded feed worker

enum class FeedStatus { Pending, Running, Finished, Faulted };
const char* to_string(FeedStatus s) noexcept;

/// Snapshot-readable state shared between a feed worker and the HTTP API.
class FeedState {
public:
    explicit FeedState(FeedConfig cfg);

    const FeedConfig& config() const noexcept { return cfg_; }
    FeedStatus status() const;
    std::string error() const;
    std::uint64_t frames() const;
    std::uint64_t dropped() const;
    std::vector<compliance::WindowSnapshot> history() const;
    std::optional<std::string> calibration_json() const;

    /// Overlay lines with sequence number >= `from`; `next` receives the following number.
    std::vector<std::string> overlay_since(std::uint64_t from, std::uint64_t& next) const;
    /// Waits until new overlay lines exist, the feed stops, or the timeout passes.
    bool wait_overlay(std::uint64_t from, std::chrono::milliseconds timeout) const;
    bool active() const;

    /// Validates, stores and hands the document to the running processor.
    void set_calibration(const std::string& json_text);

    // worker side
    void set_status(FeedStatus s, std::string error = {});
    void add_frame(const std::string& overlay_line, std::uint64_t dropped);
    void add_window(const compliance::WindowSnapshot& w);
    void attach(FeedProcessor* processor);

private:
    FeedConfig cfg_;
    mutable std::mutex mutex_;
    mutable std::condition_variable changed_;
    FeedStatus status_ = FeedStatus::Pending;
    std::string error_;
    std::uint64_t frames_ = 0;
    std::uint64_t dropped_ = 0;
    std::deque<std::string> overlay_;
    std::uint64_t overlay_base_ = 0;
    std::vector<compliance::WindowSnapshot> history_;
    std::optional<std::string> calibration_json_;
    FeedProcessor* processor_ = nullptr;
};

struct FeedOutputs {
    std::filesystem::path overlay;
    std::filesystem::path tracks;
    std::filesystem::path metrics;
};

FeedOutputs output_paths(const std::filesystem::path& dir, const std::string& feed_id);

/// Runs one feed to completion on the calling thread (reader stage on a helper thread).
/// Faults are recorded in `state` rather than thrown.
void run_feed(FeedState& state, const EngineConfig& engine, const std::filesystem::path& output_dir);

/// One worker thread per feed.
class FeedManager {
public:
    explicit FeedManager(AppConfig config);
    ~FeedManager();

    void start();
    void wait();

    const AppConfig& config() const noexcept { return config_; }
    std::vector<std::shared_ptr<FeedState>> feeds() const { return states_; }
    std::shared_ptr<FeedState> find(const std::string& id) const;

private:
    AppConfig config_;
    std::vector<std::shared_ptr<FeedState>> states_;
    std::vector<std::thread> workers_;
};

}  // namespace socdist::pipeline
