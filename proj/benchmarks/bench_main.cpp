#include <benchmark/benchmark.h>

#include "socdist/camera_fit.hpp"
#include "socdist/pipeline.hpp"
#include "socdist/synth.hpp"

using namespace socdist;

namespace {

const FrameGeometry kHd{1920, 1080};

synth::SyntheticScene crowd(std::size_t people, double seconds) {
    synth::SceneSpec spec;
    spec.duration_s = seconds;
    synth::PeopleRecipe r;
    r.count = people;
    r.stay_visible = true;
    spec.recipe = r;
    return synth::generate_scene(spec);
}

std::vector<BoundingBox> boxes_of(const FrameDetections& f) {
    std::vector<BoundingBox> out;
    for (const auto& d : f.detections) out.push_back(d.box);
    return out;
}

calib::Calibration auto_cal() {
    calib::AutoCalibration a;
    a.camera = {3.0, 0.9, 0.5};
    a.frame = kHd;
    return a;
}

calib::Calibration tool_cal() {
    return calib::ToolCalibration{
        geo_tool::HomographyCalibration::from_quad(
            {{{420, 700}, {1500, 690}, {1250, 420}, {700, 430}}}, std::nullopt, 40.0),
        kHd,
        {}};
}

void BM_ViolationsAuto(benchmark::State& state) {
    const auto scene = crowd(static_cast<std::size_t>(state.range(0)), 0.2);
    const auto boxes = boxes_of(scene.frames.front());
    const auto cal = auto_cal();
    for (auto _ : state) benchmark::DoNotOptimize(pipeline::evaluate_violations(cal, boxes, kHd));
}
BENCHMARK(BM_ViolationsAuto)->Arg(10)->Arg(30)->Arg(100);

void BM_ViolationsTool(benchmark::State& state) {
    const auto scene = crowd(static_cast<std::size_t>(state.range(0)), 0.2);
    const auto boxes = boxes_of(scene.frames.front());
    const auto cal = tool_cal();
    for (auto _ : state) benchmark::DoNotOptimize(pipeline::evaluate_violations(cal, boxes, kHd));
}
BENCHMARK(BM_ViolationsTool)->Arg(10)->Arg(30)->Arg(100);

void BM_Warp(benchmark::State& state) {
    const auto cal = std::get<calib::ToolCalibration>(tool_cal());
    Point2 p{900.0, 650.0};
    for (auto _ : state) {
        benchmark::DoNotOptimize(cal.homography.to_birdseye(p));
        p.x += 1e-3;
    }
}
BENCHMARK(BM_Warp);

void BM_TrackerStep(benchmark::State& state) {
    const auto scene = crowd(30, 20.0);
    for (auto _ : state) {
        tracker::MultiTracker mt;
        for (const auto& f : scene.frames) benchmark::DoNotOptimize(mt.step(f));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.frames.size()));
}
BENCHMARK(BM_TrackerStep)->Unit(benchmark::kMillisecond);

void BM_FeedProcessor(benchmark::State& state) {
    const auto scene = crowd(30, 20.0);
    pipeline::FeedConfig feed;
    feed.id = "bench";
    feed.geometry = kHd;
    const auto cal = std::make_shared<const calib::Calibration>(auto_cal());
    for (auto _ : state) {
        pipeline::FeedProcessor proc(feed, {}, cal);
        for (const auto& f : scene.frames) benchmark::DoNotOptimize(proc.process(f));
        benchmark::DoNotOptimize(proc.finish());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(scene.frames.size()));
}
BENCHMARK(BM_FeedProcessor)->Unit(benchmark::kMillisecond);

void BM_CameraFit(benchmark::State& state) {
    const auto scene = crowd(12, 12.0);
    std::vector<geo_auto::CalibrationSample> samples;
    for (const auto& f : scene.frames) {
        for (const auto& d : f.detections) samples.push_back({d.box, kHd});
    }
    for (auto _ : state) benchmark::DoNotOptimize(geo_auto::fit_camera_params(samples));
}
BENCHMARK(BM_CameraFit)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
