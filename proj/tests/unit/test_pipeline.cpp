#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "socdist/error.hpp"
#include "socdist/pipeline.hpp"
#include "socdist/synth.hpp"
#include "test_support.hpp"

using namespace socdist;
using namespace socdist::pipeline;
using nlohmann::json;

namespace {

const char* kAuto = R"({"mode":"auto","frame":{"w":1920,"h":1080},"x0_m":3.0,"x1_rad":0.9,"x2_rad":0.5})";

synth::SceneSpec close_pair() {
    synth::SceneSpec spec;
    spec.fps = 10.0;
    spec.duration_s = 10.0;
    spec.people.push_back({1, 1.7, {{0.0, {-0.5, 9.0}}}, 0.0, 10.0});
    spec.people.push_back({2, 1.8, {{0.0, {0.5, 9.0}}}, 0.0, 10.0});
    return spec;
}

std::string csv_of(const synth::SyntheticScene& scene) {
    std::ostringstream out;
    synth::write_detections_csv(out, scene);
    return out.str();
}

std::vector<json> lines(const std::string& text) {
    std::vector<json> out;
    std::istringstream in(text);
    for (std::string l; std::getline(in, l);) out.push_back(json::parse(l));
    return out;
}

}  // namespace

TEST_CASE("capacity") {
    CHECK(capacity_estimate({5, 12, 16, 3}) == 20);
    CHECK(capacity_estimate({5, 8, 16, 3}) == 13);
    CHECK(capacity_estimate({4, 1, 1, 4}) == 1);
    CHECK_THROWS_AS(capacity_estimate({0, 12, 16, 3}), ConfigError);
    CHECK_THROWS_AS(capacity_estimate({5, 12, -1, 3}), ConfigError);
}

TEST_CASE("bounded queue policies") {
    BoundedQueue<int> drop(2, OverflowPolicy::DropOldest);
    for (int i = 0; i < 5; ++i) CHECK(drop.push(i));
    CHECK(drop.dropped() == 3);
    CHECK(*drop.pop() == 3);
    CHECK(*drop.pop() == 4);
    drop.close();
    CHECK_FALSE(drop.pop().has_value());
    CHECK_FALSE(drop.push(9));

    BoundedQueue<int> block(1, OverflowPolicy::Block);
    block.push(1);
    std::thread consumer([&] {
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
        block.pop();
    });
    CHECK(block.push(2));
    consumer.join();
    CHECK(block.dropped() == 0);
}

TEST_CASE("config parsing") {
    const auto app = parse_app_config(R"({
        "output_dir": "results",
        "tracker": {"min_hits": 2},
        "compliance": {"window_s": 10, "duration_mode": "longest_run"},
        "feeds": [{"id": "a", "source": "a.csv", "fps": 10, "geometry": {"w": 640, "h": 480},
                   "calibration": "cal.json", "alerts": {"thresholds": {"high_risk_pairs": 2}}}]
    })", "/base");
    REQUIRE(app.feeds.size() == 1);
    CHECK(app.output_dir == "/base/results");
    CHECK(app.engine.tracker.min_hits == 2);
    CHECK(app.engine.window.span_s == 10.0);
    CHECK(app.engine.window.mode == compliance::DurationMode::LongestRun);
    CHECK(app.feeds[0].source == "/base/a.csv");
    CHECK(app.feeds[0].calibration_path == std::filesystem::path("/base/cal.json"));
    CHECK(app.feeds[0].alerts.thresholds.at("high_risk_pairs") == 2.0);

    CHECK_THROWS_AS(parse_app_config("{", {}), ConfigError);
    CHECK_THROWS_AS(parse_app_config(R"({"feeds":[{"id":"a","source":"x","fps":0,"geometry":{"w":1,"h":1}}]})"),
                    ConfigError);
    CHECK_THROWS_AS(
        parse_app_config(R"({"feeds":[{"id":"a","source":"x","geometry":{"w":1,"h":1}},
                                      {"id":"a","source":"y","geometry":{"w":1,"h":1}}]})"),
        ConfigError);
    CHECK_THROWS_AS(
        parse_app_config(R"({"feeds":[{"id":"a","source":"x","geometry":{"w":1,"h":1},
                                       "alerts":{"thresholds":{"bogus":1}}}]})"),
        ConfigError);
}

TEST_CASE("blur region is the top of the box") {
    const auto b = blur_region({10, 100, 50, 200}, 0.2);
    CHECK(b == BoundingBox{10, 100, 50, 120});
}

TEST_CASE("close pair: both red, one high-risk pair, one cluster of two") {
    const auto scene = synth::generate_scene(close_pair());
    FeedConfig feed;
    feed.id = "cam";
    feed.fps = 10.0;
    feed.geometry = {1920, 1080};
    FeedProcessor proc(feed, {}, std::make_shared<const calib::Calibration>(calib::parse_calibration(kAuto)));
    std::vector<WindowReport> reports;
    for (const auto& f : scene.frames) {
        const auto r = proc.process(f);
        CHECK(r.overlay.people.size() == 2);
        for (const auto& p : r.overlay.people) CHECK(p.violating);
        CHECK(r.overlay.pairs.size() == 1);
        reports.insert(reports.end(), r.windows.begin(), r.windows.end());
    }
    for (auto& r : proc.finish()) reports.push_back(std::move(r));
    REQUIRE(reports.size() == 1);
    const auto& m = reports[0].window.metrics;
    CHECK(m.high_risk_pairs == 1);
    CHECK(m.cluster_sizes == std::vector<std::size_t>{2});
    CHECK(m.violators == 2);
}

TEST_CASE("uncalibrated frames carry no pairs") {
    FeedConfig feed;
    feed.id = "cam";
    feed.geometry = {1920, 1080};
    FeedProcessor proc(feed, {}, nullptr);
    const auto r = proc.process({0, 0.0, {{{100, 100, 140, 200}, 1.0}}});
    CHECK_FALSE(r.overlay.calibrated);
    REQUIRE(r.overlay.people.size() == 1);
    CHECK_FALSE(r.overlay.people[0].violating);
    CHECK(json::parse(overlay_json(r.overlay))["people"][0].contains("blur"));
}

TEST_CASE("feed runs: empty source, isolation and determinism") {
    test::TempDir dir;
    test::write_file(dir / "cal.json", kAuto);
    test::write_file(dir / "empty.csv", "");
    test::write_file(dir / "pair.csv", csv_of(synth::generate_scene(close_pair())));
    const std::string cfg = R"({
        "output_dir": "out",
        "feeds": [
          {"id": "empty", "source": "empty.csv", "fps": 10, "geometry": {"w":1920,"h":1080}, "calibration": "cal.json"},
          {"id": "pair", "source": "pair.csv", "fps": 10, "geometry": {"w":1920,"h":1080}, "calibration": "cal.json"},
          {"id": "broken", "source": "missing.csv", "fps": 10, "geometry": {"w":1920,"h":1080}, "calibration": "cal.json"},
          {"id": "badcal", "source": "pair.csv", "fps": 10, "geometry": {"w":1920,"h":1080}, "calibration": {"mode":"auto"}}
        ]})";
    test::write_file(dir / "config.json", cfg);

    auto run_once = [&] {
        FeedManager mgr(load_app_config(dir / "config.json"));
        mgr.start();
        mgr.wait();
        CHECK(mgr.find("empty")->status() == FeedStatus::Finished);
        CHECK(mgr.find("pair")->status() == FeedStatus::Finished);
        CHECK(mgr.find("broken")->status() == FeedStatus::Faulted);
        CHECK(mgr.find("badcal")->status() == FeedStatus::Faulted);
        CHECK(mgr.find("pair")->frames() == 100);
        const auto p = output_paths(dir / "out", "pair");
        return test::read_file(p.overlay) + test::read_file(p.tracks) + test::read_file(p.metrics);
    };
    const auto first = run_once();
    const auto second = run_once();
    CHECK(first == second);

    const auto empty = output_paths(dir / "out", "empty");
    CHECK(test::read_file(empty.overlay).empty());
    const auto metrics = lines(test::read_file(output_paths(dir / "out", "pair").metrics));
    REQUIRE(metrics.size() == 1);
    CHECK(metrics[0]["feed"] == "pair");
    CHECK(metrics[0]["high_risk_pairs"] == 1);

    // Isolation: the pair feed alone produces the same bytes.
    test::write_file(dir / "solo.json", R"({"output_dir": "solo", "feeds": [
        {"id": "pair", "source": "pair.csv", "fps": 10, "geometry": {"w":1920,"h":1080}, "calibration": "cal.json"}]})");
    FeedManager solo(load_app_config(dir / "solo.json"));
    solo.start();
    solo.wait();
    const auto p = output_paths(dir / "solo", "pair");
    CHECK(test::read_file(p.overlay) + test::read_file(p.tracks) + test::read_file(p.metrics) == first);
}

TEST_CASE("zero-detection frames give empty overlays and zero metrics") {
    test::TempDir dir;
    test::write_file(dir / "cal.json", kAuto);
    // One detection on frame 400 so that frames 1..399 are empty.
    test::write_file(dir / "sparse.csv", "400,-1,900,400,60,150,1\n");
    test::write_file(dir / "config.json", R"({"output_dir": "out", "feeds": [
        {"id": "s", "source": "sparse.csv", "fps": 10, "geometry": {"w":1920,"h":1080}, "calibration": "cal.json"}]})");
    FeedManager mgr(load_app_config(dir / "config.json"));
    mgr.start();
    mgr.wait();
    const auto p = output_paths(dir / "out", "s");
    const auto overlays = lines(test::read_file(p.overlay));
    REQUIRE(overlays.size() == 400);
    CHECK(overlays[0]["people"].empty());
    const auto metrics = lines(test::read_file(p.metrics));
    REQUIRE(metrics.size() == 2);
    CHECK(metrics[0]["distinct_people"] == 0);
    CHECK(metrics[0]["violation_pairs"] == 0);
}

TEST_CASE("state rejects a calibration of the wrong mode") {
    FeedConfig cfg;
    cfg.id = "x";
    cfg.source = "x.csv";
    cfg.geometry = {1920, 1080};
    cfg.calibration_mode = "tool";
    FeedState state(cfg);
    CHECK_THROWS_AS(state.set_calibration(kAuto), calib::DocumentError);
    CHECK_FALSE(state.calibration_json().has_value());
}

TEST_CASE("noiseless scene reproduces the violation schedule") {
    synth::SceneSpec spec;
    spec.fps = 25.0;
    spec.duration_s = 20.0;
    spec.seed = 12;
    synth::PeopleRecipe recipe;
    recipe.count = 14;
    recipe.max_depth_m = 14.0;
    recipe.stay_visible = true;
    spec.recipe = recipe;
    const auto scene = synth::generate_scene(spec);

    FeedConfig feed;
    feed.id = "cam";
    feed.fps = spec.fps;
    feed.geometry = spec.geometry;
    FeedProcessor proc(feed, {}, std::make_shared<const calib::Calibration>(calib::parse_calibration(kAuto)));
    std::size_t total_pairs = 0;
    for (std::size_t f = 0; f < scene.frames.size(); ++f) {
        const auto& frame = scene.frames[f];
        const auto r = proc.process(frame);
        std::map<TrackId, TrackId> truth_of;
        for (const auto& p : r.overlay.people) {
            for (std::size_t d = 0; d < frame.detections.size(); ++d) {
                if (frame.detections[d].box == p.box) truth_of[p.id] = scene.truth_ids[f][d];
            }
        }
        REQUIRE(truth_of.size() == frame.detections.size());
        std::vector<IdPair> mapped;
        for (const auto& [a, b] : r.overlay.pairs) {
            mapped.push_back(ordered_pair(truth_of.at(a), truth_of.at(b)));
        }
        std::sort(mapped.begin(), mapped.end());
        CHECK(mapped == scene.violations[f]);
        total_pairs += mapped.size();
    }
    CHECK(total_pairs > 0);
}

TEST_CASE("json-lines file source") {
    test::TempDir dir;
    test::write_file(dir / "feed.jsonl",
                     "{\"frame\":0,\"ts\":0.0,\"boxes\":[[900,400,960,550,0.9]]}\n"
                     "\n"
                     "{\"frame\":1,\"ts\":0.1,\"boxes\":[[902,400,962,550,0.9]]}\n");
    FeedConfig cfg;
    cfg.id = "j";
    cfg.source = (dir / "feed.jsonl").string();
    cfg.fps = 10.0;
    cfg.geometry = {1920, 1080};
    cfg.calibration_json = kAuto;
    FeedState state(cfg);
    run_feed(state, {}, dir / "out");
    CHECK(state.status() == FeedStatus::Finished);
    CHECK(state.frames() == 2);
}

TEST_CASE("unix socket source skips out-of-order frames") {
    test::TempDir dir;
    const auto sock = (dir / "feed.sock").string();
    FeedConfig cfg;
    cfg.id = "live";
    cfg.source = "unix:" + sock;
    cfg.fps = 10.0;
    cfg.geometry = {1920, 1080};
    cfg.calibration_json = kAuto;
    FeedState state(cfg);
    CHECK(cfg.live());
    std::thread worker([&] { run_feed(state, {}, dir / "out"); });

    int fd = -1;
    for (int attempt = 0; attempt < 200 && fd < 0; ++attempt) {
        fd = ::socket(AF_UNIX, SOCK_STREAM, 0);
        sockaddr_un addr{};
        addr.sun_family = AF_UNIX;
        std::copy(sock.begin(), sock.end(), addr.sun_path);
        if (::connect(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0) {
            ::close(fd);
            fd = -1;
            std::this_thread::sleep_for(std::chrono::milliseconds(10));
        }
    }
    REQUIRE(fd >= 0);
    const std::string payload =
        "{\"frame\":0,\"boxes\":[[900,400,960,550]]}\n"
        "{\"frame\":1,\"boxes\":[[902,400,962,550]]}\n"
        "{\"frame\":1,\"boxes\":[[902,400,962,550]]}\n"
        "{\"frame\":2,\"boxes\":[[904,400,964,550]]}";
    CHECK(::write(fd, payload.data(), payload.size()) == static_cast<ssize_t>(payload.size()));
    ::close(fd);
    worker.join();
    CHECK(state.status() == FeedStatus::Finished);
    CHECK(state.frames() == 3);
    std::uint64_t next = 0;
    CHECK(state.overlay_since(0, next).size() == 3);
    CHECK(next == 3);
}

TEST_CASE("autofit calibrates an uncalibrated feed") {
    synth::SceneSpec spec;
    spec.fps = 10.0;
    spec.duration_s = 20.0;
    spec.seed = 21;
    synth::PeopleRecipe recipe;
    recipe.count = 10;
    spec.recipe = recipe;
    const auto scene = synth::generate_scene(spec);
    FeedConfig feed;
    feed.id = "fit";
    feed.fps = spec.fps;
    feed.geometry = spec.geometry;
    feed.autofit.enabled = true;
    FeedProcessor proc(feed, {}, nullptr);
    bool calibrated = false;
    for (const auto& f : scene.frames) calibrated = proc.process(f).overlay.calibrated;
    CHECK(calibrated);
    const auto& cal = std::get<calib::AutoCalibration>(*proc.calibration());
    CHECK(cal.camera.height_m == doctest::Approx(3.0).epsilon(0.02));
    CHECK(cal.camera.tilt_rad == doctest::Approx(0.5).epsilon(0.02));
}

TEST_CASE("near-camera people are flagged in auto mode") {
    const auto cal = calib::parse_calibration(kAuto);
    const geo_auto::CameraParams cam{3.0, 0.9, 0.5};
    // Feet on the bottom row are about 2.2 m out; a box cut at the bottom edge is closer.
    const std::vector<BoundingBox> boxes{synth::forward_project({0.0, 8.0}, 1.7, cam, {1920, 1080}),
                                         {900, 500, 1100, 1080}};
    const auto near = evaluate_violations(cal, boxes, {1920, 1080}, 2.5);
    CHECK_FALSE(near.near_camera[0]);
    CHECK(near.near_camera[1]);
}
