#include "socdist/pipeline.hpp"

#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"
#include "socdist/error.hpp"

namespace socdist::pipeline {
namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------------------

std::int64_t capacity_estimate(const CapacityInputs& c) {
    if (!(c.aip > 0.0) || !(c.cpu_cores > 0.0) || !(c.gpu_memory_gb > 0.0) || !(c.sef > 0.0)) {
        throw ConfigError("capacity inputs must all be positive");
    }
    const double maxal = std::min(c.cpu_cores, c.gpu_memory_gb);
    return static_cast<std::int64_t>(std::floor(c.aip * maxal / c.sef));
}

// ---------------------------------------------------------------------------------------

bool FeedConfig::live() const { return source == "-" || source.starts_with("unix:"); }

void FeedConfig::validate() const {
    if (id.empty()) throw ConfigError("feed id must not be empty");
    if (!(fps > 0.0)) throw ConfigError("feed '" + id + "': fps must be positive");
    if (!geometry.valid()) throw ConfigError("feed '" + id + "': geometry must be at least 1x1");
    if (source.empty()) throw ConfigError("feed '" + id + "': source is required");
    if (calibration_mode && *calibration_mode != "tool" && *calibration_mode != "auto") {
        throw ConfigError("feed '" + id + "': calibration_mode must be tool or auto");
    }
}

namespace {

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field '") + key + "': " + e.what());
    }
}

fs::path resolve(const fs::path& base, const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() || base.empty() ? path : base / path;
}

FeedConfig parse_feed(const json& j, const fs::path& base) {
    if (!j.is_object()) throw ConfigError("each feed must be an object");
    FeedConfig f;
    read_opt(j, "id", f.id);
    std::string source;
    read_opt(j, "source", source);
    f.source = (source == "-" || source.starts_with("unix:") || source.empty())
                   ? source
                   : resolve(base, source).string();
    read_opt(j, "fps", f.fps);
    if (j.contains("geometry")) {
        const auto& g = j["geometry"];
        read_opt(g, "w", f.geometry.width);
        read_opt(g, "h", f.geometry.height);
    }
    if (j.contains("calibration")) {
        const auto& c = j["calibration"];
        if (c.is_object()) {
            f.calibration_json = c.dump();
        } else if (c.is_string()) {
            f.calibration_path = resolve(base, c.get<std::string>());
        } else {
            throw ConfigError("feed calibration must be an object or a path");
        }
    }
    if (j.contains("calibration_mode")) {
        std::string mode;
        read_opt(j, "calibration_mode", mode);
        f.calibration_mode = mode;
    }
    if (j.contains("frame")) {
        std::string still;
        read_opt(j, "frame", still);
        f.still_frame = resolve(base, still);
    }
    if (j.contains("alerts")) {
        const auto& a = j["alerts"];
        read_opt(a, "thresholds", f.alerts.thresholds);
        read_opt(a, "rearm_ratio", f.alerts.rearm_ratio);
        read_opt(a, "hook", f.alerts.hook);
        for (const auto& [name, t] : f.alerts.thresholds) {
            compliance::metric_value(compliance::ComplianceMetrics{}, name);
        }
    }
    if (j.contains("autofit")) {
        const auto& a = j["autofit"];
        f.autofit.enabled = true;
        read_opt(a, "enabled", f.autofit.enabled);
        read_opt(a, "min_samples", f.autofit.fit.min_samples);
        read_opt(a, "nominal_height_m", f.autofit.fit.nominal_height_m);
        read_opt(a, "min_depth_m", f.autofit.fit.min_depth_m);
        read_opt(a, "radius_m", f.autofit.radius_m);
    }
    f.validate();
    return f;
}

}  // namespace

AppConfig parse_app_config(std::string_view text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");

    AppConfig app;
    if (doc.contains("output_dir")) {
        std::string out;
        read_opt(doc, "output_dir", out);
        app.output_dir = resolve(base_dir, out);
    } else {
        app.output_dir = resolve(base_dir, "out");
    }
    auto& e = app.engine;
    if (doc.contains("ingest")) {
        const auto& i = doc["ingest"];
        read_opt(i, "confidence_floor", e.ingest.confidence_floor);
        read_opt(i, "strict", e.ingest.filter.strict);
        read_opt(i, "min_area_px2", e.ingest.filter.min_area_px2);
        read_opt(i, "min_aspect", e.ingest.filter.min_aspect);
        read_opt(i, "max_aspect", e.ingest.filter.max_aspect);
    }
    if (doc.contains("tracker")) {
        const auto& t = doc["tracker"];
        read_opt(t, "iou_min", e.tracker.iou_min);
        read_opt(t, "max_staleness", e.tracker.max_staleness);
        read_opt(t, "min_hits", e.tracker.min_hits);
        read_opt(t, "process_noise", e.tracker.process_noise);
        read_opt(t, "size_process_noise", e.tracker.size_process_noise);
        read_opt(t, "measurement_noise", e.tracker.measurement_noise);
        read_opt(t, "max_output_staleness", e.tracker.max_output_staleness);
    }
    e.tracker.validate();
    if (doc.contains("compliance")) {
        const auto& c = doc["compliance"];
        read_opt(c, "window_s", e.window.span_s);
        read_opt(c, "high_risk_s", e.window.high_risk_s);
        read_opt(c, "horizon_s", e.horizon_s);
        std::string mode = "total";
        read_opt(c, "duration_mode", mode);
        if (mode == "total") {
            e.window.mode = compliance::DurationMode::Total;
        } else if (mode == "longest_run") {
            e.window.mode = compliance::DurationMode::LongestRun;
        } else {
            throw ConfigError("duration_mode must be total or longest_run");
        }
    }
    e.window.validate();
    read_opt(doc, "blur_fraction", e.blur_fraction);
    read_opt(doc, "queue_capacity", e.queue_capacity);
    if (!(e.blur_fraction >= 0.0 && e.blur_fraction <= 1.0)) {
        throw ConfigError("blur_fraction must be in [0, 1]");
    }

    if (!doc.contains("feeds") || !doc["feeds"].is_array()) {
        throw ConfigError("config needs a \"feeds\" array");
    }
    std::set<std::string> ids;
    for (const auto& f : doc["feeds"]) {
        app.feeds.push_back(parse_feed(f, base_dir));
        if (!ids.insert(app.feeds.back().id).second) {
            throw ConfigError("duplicate feed id '" + app.feeds.back().id + "'");
        }
    }
    return app;
}

AppConfig load_app_config(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_app_config(ss.str(), path.parent_path());
}

// ---------------------------------------------------------------------------------------

BoundingBox blur_region(const BoundingBox& box, double fraction) {
    return {box.x_min, box.y_min, box.x_max, box.y_min + fraction * box.height()};
}

ViolationStage evaluate_violations(const calib::Calibration& cal, std::span<const BoundingBox> boxes,
                                   const FrameGeometry& geometry, double near_depth_m) {
    ViolationStage out;
    out.violating.assign(boxes.size(), false);
    out.excluded.assign(boxes.size(), false);
    out.near_camera.assign(boxes.size(), false);
    if (const auto* tool = std::get_if<calib::ToolCalibration>(&cal)) {
        std::vector<Point2> feet;
        feet.reserve(boxes.size());
        for (const auto& b : boxes) feet.push_back(b.feet());
        auto r = geo_tool::birdseye_violations(tool->homography, feet);
        out.pairs = std::move(r.pairs);
        out.ellipses.assign(boxes.size(), std::nullopt);
        for (std::size_t i = 0; i < boxes.size(); ++i) out.excluded[i] = !r.warped[i];
        out.excluded_count = r.horizon_excluded;
    } else {
        const auto& a = std::get<calib::AutoCalibration>(cal);
        auto r = geo_auto::auto_violations(boxes, a.camera, geometry, a.radius_m);
        out.pairs = std::move(r.pairs);
        out.ellipses = std::move(r.ellipses);
        for (std::size_t i = 0; i < boxes.size(); ++i) {
            out.excluded[i] = !r.ground[i];
            out.near_camera[i] = r.ground[i] && r.ground[i]->depth_m < near_depth_m;
        }
        out.excluded_count = r.horizon_excluded;
    }
    for (const auto& [i, j] : out.pairs) {
        out.violating[i] = true;
        out.violating[j] = true;
    }
    return out;
}

// ---------------------------------------------------------------------------------------

FeedProcessor::FeedProcessor(const FeedConfig& feed, const EngineConfig& engine,
                             std::shared_ptr<const calib::Calibration> calibration)
    : feed_(feed),
      engine_(engine),
      tracker_(engine.tracker),
      windows_(engine.window),
      alerts_(feed.alerts.thresholds, feed.alerts.rearm_ratio),
      calibration_(std::move(calibration)) {}

void FeedProcessor::set_calibration(std::shared_ptr<const calib::Calibration> calibration) {
    std::lock_guard lock(cal_mutex_);
    calibration_ = std::move(calibration);
}

std::shared_ptr<const calib::Calibration> FeedProcessor::calibration() const {
    std::lock_guard lock(cal_mutex_);
    return calibration_;
}

void FeedProcessor::maybe_autofit(const FrameDetections& frame) {
    if (!feed_.autofit.enabled || fit_done_) return;
    if (pending_fit_.valid()) {
        const bool ready = !feed_.live() || pending_fit_.wait_for(std::chrono::seconds(0)) ==
                                                std::future_status::ready;
        if (!ready) return;
        try {
            const auto fit = pending_fit_.get();
            set_calibration(std::make_shared<const calib::Calibration>(
                calib::auto_from_fit(fit, feed_.geometry, feed_.autofit.radius_m)));
            fit_done_ = true;
        } catch (const NotEnoughDataError&) {
            // keep collecting and retry with more samples
        }
        return;
    }
    for (const auto& d : frame.detections) fit_samples_.push_back({d.box, feed_.geometry});
    if (next_fit_at_ == 0) next_fit_at_ = std::max<std::size_t>(feed_.autofit.fit.min_samples, 1);
    if (fit_samples_.size() >= next_fit_at_) {
        next_fit_at_ = fit_samples_.size() + std::max<std::size_t>(feed_.autofit.fit.min_samples, 1);
        pending_fit_ = std::async(std::launch::async, [samples = fit_samples_, cfg = feed_.autofit.fit] {
            return geo_auto::fit_camera_params(samples, cfg);
        });
    }
}

FrameResult FeedProcessor::process(const FrameDetections& frame) {
    maybe_autofit(frame);

    FrameResult result;
    result.tracks = tracker_.step(frame);
    const auto cal = calibration();

    std::vector<BoundingBox> boxes;
    boxes.reserve(result.tracks.size());
    for (const auto& t : result.tracks) {
        boxes.push_back(t.detection_index ? frame.detections[*t.detection_index].box : t.box);
    }

    auto& overlay = result.overlay;
    overlay.frame_index = frame.frame_index;
    overlay.ts = frame.timestamp;
    overlay.calibrated = static_cast<bool>(cal);
    std::optional<ViolationStage> stage;
    if (cal) stage = evaluate_violations(*cal, boxes, feed_.geometry, feed_.autofit.fit.min_depth_m);

    std::vector<TrackId> ids;
    for (std::size_t i = 0; i < boxes.size(); ++i) {
        PersonOverlay p;
        p.id = result.tracks[i].id;
        p.box = boxes[i];
        p.blur = blur_region(boxes[i], engine_.blur_fraction);
        if (stage) {
            p.violating = stage->violating[i];
            p.ellipse = stage->ellipses[i];
            p.excluded = stage->excluded[i];
            p.near_camera = stage->near_camera[i];
        }
        ids.push_back(p.id);
        overlay.people.push_back(std::move(p));
    }
    if (stage) {
        for (const auto& [i, j] : stage->pairs) overlay.pairs.push_back(ordered_pair(ids[i], ids[j]));
        std::sort(overlay.pairs.begin(), overlay.pairs.end());
        overlay.excluded = stage->excluded_count;
    }

    result.windows = report(windows_.add_frame(frame.timestamp, ids, overlay.pairs, 1.0 / feed_.fps));
    return result;
}

std::vector<WindowReport> FeedProcessor::finish() {
    std::vector<compliance::WindowSnapshot> closed;
    if (auto last = windows_.flush()) closed.push_back(std::move(*last));
    return report(std::move(closed));
}

std::vector<WindowReport> FeedProcessor::report(std::vector<compliance::WindowSnapshot> closed) {
    std::vector<WindowReport> out;
    for (auto& w : closed) {
        history_.push_back(w);
        WindowReport r;
        r.window = std::move(w);
        r.rolling = compliance::rolling_metrics(history_, engine_.horizon_s);
        r.alerts = alerts_.check(r.rolling);
        if (!feed_.alerts.hook.empty()) {
            for (const auto& a : r.alerts) {
                std::string payload = alert_json(feed_.id, a);
                std::string quoted = "'";
                for (char c : payload) quoted += c == '\'' ? std::string("'\\''") : std::string(1, c);
                quoted += "'";
                [[maybe_unused]] const int rc = std::system((feed_.alerts.hook + " " + quoted).c_str());
            }
        }
        out.push_back(std::move(r));
    }
    return out;
}

// ---------------------------------------------------------------------------------------

const char* to_string(FeedStatus s) noexcept {
    switch (s) {
        case FeedStatus::Pending: return "pending";
        case FeedStatus::Running: return "running";
        case FeedStatus::Finished: return "finished";
        case FeedStatus::Faulted: return "faulted";
    }
    return "unknown";
}

FeedState::FeedState(FeedConfig cfg) : cfg_(std::move(cfg)) {
    calibration_json_ = cfg_.calibration_json;
}

FeedStatus FeedState::status() const {
    std::lock_guard lock(mutex_);
    return status_;
}

std::string FeedState::error() const {
    std::lock_guard lock(mutex_);
    return error_;
}

std::uint64_t FeedState::frames() const {
    std::lock_guard lock(mutex_);
    return frames_;
}

std::uint64_t FeedState::dropped() const {
    std::lock_guard lock(mutex_);
    return dropped_;
}

std::vector<compliance::WindowSnapshot> FeedState::history() const {
    std::lock_guard lock(mutex_);
    return history_;
}

std::optional<std::string> FeedState::calibration_json() const {
    std::lock_guard lock(mutex_);
    return calibration_json_;
}

bool FeedState::active() const {
    std::lock_guard lock(mutex_);
    return status_ == FeedStatus::Pending || status_ == FeedStatus::Running;
}

std::vector<std::string> FeedState::overlay_since(std::uint64_t from, std::uint64_t& next) const {
    std::lock_guard lock(mutex_);
    std::vector<std::string> out;
    const std::uint64_t start = std::max(from, overlay_base_);
    for (std::uint64_t k = start; k < overlay_base_ + overlay_.size(); ++k) {
        out.push_back(overlay_[k - overlay_base_]);
    }
    next = overlay_base_ + overlay_.size();
    return out;
}

bool FeedState::wait_overlay(std::uint64_t from, std::chrono::milliseconds timeout) const {
    std::unique_lock lock(mutex_);
    return changed_.wait_for(lock, timeout, [&] {
        return overlay_base_ + overlay_.size() > from ||
               (status_ != FeedStatus::Pending && status_ != FeedStatus::Running);
    });
}

void FeedState::set_calibration(const std::string& json_text) {
    auto parsed = calib::parse_calibration(json_text);
    if (cfg_.calibration_mode && *cfg_.calibration_mode != calib::mode_of(parsed)) {
        throw calib::DocumentError("mode",
                                   "feed expects a \"" + *cfg_.calibration_mode + "\" calibration");
    }
    auto shared = std::make_shared<const calib::Calibration>(std::move(parsed));
    std::lock_guard lock(mutex_);
    calibration_json_ = calib::serialize_calibration(*shared);
    if (processor_) processor_->set_calibration(std::move(shared));
}

void FeedState::set_status(FeedStatus s, std::string error) {
    std::lock_guard lock(mutex_);
    status_ = s;
    error_ = std::move(error);
    changed_.notify_all();
}

void FeedState::add_frame(const std::string& overlay_line, std::uint64_t dropped) {
    static constexpr std::size_t kOverlayBuffer = 1024;
    std::lock_guard lock(mutex_);
    ++frames_;
    dropped_ = dropped;
    overlay_.push_back(overlay_line);
    while (overlay_.size() > kOverlayBuffer) {
        overlay_.pop_front();
        ++overlay_base_;
    }
    changed_.notify_all();
}

void FeedState::add_window(const compliance::WindowSnapshot& w) {
    std::lock_guard lock(mutex_);
    history_.push_back(w);
}

void FeedState::attach(FeedProcessor* processor) {
    std::lock_guard lock(mutex_);
    processor_ = processor;
}

// ---------------------------------------------------------------------------------------

FeedOutputs output_paths(const fs::path& dir, const std::string& feed_id) {
    return {dir / (feed_id + ".overlay.jsonl"), dir / (feed_id + ".tracks.jsonl"),
            dir / (feed_id + ".metrics.jsonl")};
}

namespace {

/// Line reader over a connected Unix-domain socket.
class UnixSocketLines {
public:
    explicit UnixSocketLines(const std::string& path) : path_(path) {
        listen_fd_ = ::socket(AF_UNIX, SOCK_STREAM, 0);
        if (listen_fd_ < 0) throw ConfigError("cannot create socket");
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        if (path.size() >= sizeof(addr.sun_path)) throw ConfigError("socket path too long");
        std::copy(path.begin(), path.end(), addr.sun_path);
        ::unlink(path.c_str());
        if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 ||
            ::listen(listen_fd_, 1) != 0) {
            ::close(listen_fd_);
            throw ConfigError("cannot listen on " + path);
        }
    }
    ~UnixSocketLines() {
        if (conn_fd_ >= 0) ::close(conn_fd_);
        if (listen_fd_ >= 0) ::close(listen_fd_);
        ::unlink(path_.c_str());
    }
    UnixSocketLines(const UnixSocketLines&) = delete;
    UnixSocketLines& operator=(const UnixSocketLines&) = delete;

    bool next(std::string& line) {
        if (conn_fd_ < 0) {
            conn_fd_ = ::accept(listen_fd_, nullptr, nullptr);
            if (conn_fd_ < 0) return false;
        }
        while (true) {
            if (const auto nl = buffer_.find('\n'); nl != std::string::npos) {
                line = buffer_.substr(0, nl);
                buffer_.erase(0, nl + 1);
                return true;
            }
            char chunk[4096];
            const auto n = ::read(conn_fd_, chunk, sizeof chunk);
            if (n <= 0) {
                if (buffer_.empty()) return false;
                line = std::move(buffer_);
                buffer_.clear();
                return true;
            }
            buffer_.append(chunk, static_cast<std::size_t>(n));
        }
    }

private:
    std::string path_;
    int listen_fd_ = -1;
    int conn_fd_ = -1;
    std::string buffer_;
};

bool is_json_lines(const std::string& source) {
    const auto ext = fs::path(source).extension().string();
    return ext == ".jsonl" || ext == ".ndjson" || ext == ".json";
}

std::ofstream open_output(const fs::path& p) {
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + p.string());
    return out;
}

std::shared_ptr<const calib::Calibration> load_calibration(FeedState& state) {
    const auto& cfg = state.config();
    if (!state.calibration_json() && cfg.calibration_path) {
        std::ifstream in(*cfg.calibration_path);
        if (!in) throw ConfigError("cannot open calibration " + cfg.calibration_path->string());
        std::stringstream ss;
        ss << in.rdbuf();
        state.set_calibration(ss.str());
    } else if (const auto text = state.calibration_json()) {
        state.set_calibration(*text);
    }
    const auto text = state.calibration_json();
    if (!text) {
        if (cfg.autofit.enabled) return nullptr;
        throw ConfigError("feed '" + cfg.id + "' has no calibration and autofit is disabled");
    }
    return std::make_shared<const calib::Calibration>(calib::parse_calibration(*text));
}

}  // namespace

void run_feed(FeedState& state, const EngineConfig& engine, const fs::path& output_dir) {
    const FeedConfig& cfg = state.config();
    state.set_status(FeedStatus::Running);
    try {
        auto calibration = load_calibration(state);
        if (!cfg.live() && !fs::is_regular_file(cfg.source)) {
            throw ConfigError("cannot open source " + cfg.source);
        }
        fs::create_directories(output_dir);
        const auto paths = output_paths(output_dir, cfg.id);
        auto overlay_out = open_output(paths.overlay);
        auto tracks_out = open_output(paths.tracks);
        auto metrics_out = open_output(paths.metrics);

        ingest::IngestConfig icfg = engine.ingest;
        icfg.fps = cfg.fps;
        const bool live = cfg.live();
        BoundedQueue<FrameDetections> queue(
            engine.queue_capacity, live ? OverflowPolicy::DropOldest : OverflowPolicy::Block);

        std::string reader_error;
        std::thread reader([&] {
            try {
                ingest::StreamSequencer sequencer;
                auto emit = [&](FrameDetections fd) {
                    try {
                        sequencer.check(fd);
                    } catch (const SequenceError&) {
                        if (!live) throw;
                        return true;
                    }
                    return queue.push(std::move(fd));
                };
                auto pump_lines = [&](auto&& next_line) {
                    std::string line;
                    std::size_t n = 0;
                    while (next_line(line)) {
                        ++n;
                        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
                        if (!emit(ingest::parse_frame_json(line, cfg.geometry, icfg, n))) break;
                    }
                };
                if (cfg.source == "-") {
                    pump_lines([](std::string& l) { return static_cast<bool>(std::getline(std::cin, l)); });
                } else if (cfg.source.starts_with("unix:")) {
                    UnixSocketLines sock(cfg.source.substr(5));
                    pump_lines([&](std::string& l) { return sock.next(l); });
                } else {
                    std::ifstream in(cfg.source, std::ios::binary);
                    if (!in) throw ConfigError("cannot open source " + cfg.source);
                    if (is_json_lines(cfg.source)) {
                        pump_lines([&](std::string& l) { return static_cast<bool>(std::getline(in, l)); });
                    } else {
                        for (auto& fd : ingest::read_detection_csv(in, cfg.geometry, icfg)) {
                            if (!emit(std::move(fd))) break;
                        }
                    }
                }
            } catch (const std::exception& e) {
                reader_error = e.what();
            }
            queue.close();
        });

        FeedProcessor processor(cfg, engine, calibration);
        state.attach(&processor);
        auto write_windows = [&](const std::vector<WindowReport>& reports) {
            for (const auto& r : reports) {
                metrics_out << metrics_json(cfg.id, r) << '\n';
                state.add_window(r.window);
            }
        };
        try {
            while (auto fd = queue.pop()) {
                const auto result = processor.process(*fd);
                const auto line = overlay_json(result.overlay);
                overlay_out << line << '\n';
                tracks_out << tracks_json(fd->frame_index, fd->timestamp, result.tracks) << '\n';
                write_windows(result.windows);
                state.add_frame(line, queue.dropped());
            }
            write_windows(processor.finish());
        } catch (...) {
            state.attach(nullptr);
            queue.close();
            reader.join();
            throw;
        }
        state.attach(nullptr);
        reader.join();
        if (!reader_error.empty()) throw Error(reader_error);
        state.set_status(FeedStatus::Finished);
    } catch (const std::exception& e) {
        state.set_status(FeedStatus::Faulted, e.what());
    }
}

FeedManager::FeedManager(AppConfig config) : config_(std::move(config)) {
    for (const auto& f : config_.feeds) states_.push_back(std::make_shared<FeedState>(f));
}

FeedManager::~FeedManager() { wait(); }

void FeedManager::start() {
    for (auto& s : states_) {
        workers_.emplace_back([this, s] { run_feed(*s, config_.engine, config_.output_dir); });
    }
}

void FeedManager::wait() {
    for (auto& w : workers_) {
        if (w.joinable()) w.join();
    }
    workers_.clear();
}

std::shared_ptr<FeedState> FeedManager::find(const std::string& id) const {
    for (const auto& s : states_) {
        if (s->config().id == id) return s;
    }
    return nullptr;
}

}  // namespace socdist::pipeline
