#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "api.hpp"
#include "json.hpp"
#include "socdist/calibration_doc.hpp"
#include "socdist/camera_fit.hpp"
#include "socdist/error.hpp"
#include "socdist/ingest.hpp"
#include "socdist/mot_eval.hpp"
#include "socdist/pipeline.hpp"
#include "socdist/synth.hpp"

using namespace socdist;
using nlohmann::json;

namespace {

FrameGeometry parse_geometry(const std::string& s) {
    const auto x = s.find_first_of("xX");
    if (x == std::string::npos) throw ConfigError("geometry must look like 1920x1080");
    try {
        return {std::stoi(s.substr(0, x)), std::stoi(s.substr(x + 1))};
    } catch (const std::exception&) {
        throw ConfigError("geometry must look like 1920x1080");
    }
}

std::ifstream open_in(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open " + path);
    return in;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path);
    return out;
}

void wait_for_signal() {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);
    int sig = 0;
    sigwait(&set, &sig);
}

int cmd_run(const std::string& config_path, int port) {
    auto app = pipeline::load_app_config(config_path);
    pipeline::FeedManager manager(std::move(app));
    std::unique_ptr<httplib::Server> server;
    std::thread server_thread;
    if (port > 0) {
        server = api::make_server(manager);
        if (!server->bind_to_port("0.0.0.0", port)) throw ConfigError("cannot bind port");
        server_thread = std::thread([&] { server->listen_after_bind(); });
        std::cerr << "serving on :" << port << '\n';
    }
    manager.start();
    manager.wait();

    int rc = 0;
    for (const auto& f : manager.feeds()) {
        std::cerr << f->config().id << ": " << pipeline::to_string(f->status()) << ", "
                  << f->frames() << " frames";
        if (f->dropped()) std::cerr << ", " << f->dropped() << " dropped";
        if (!f->error().empty()) std::cerr << " (" << f->error() << ')';
        std::cerr << '\n';
        if (f->status() == pipeline::FeedStatus::Faulted) rc = 2;
    }
    if (server) {
        wait_for_signal();
        server->stop();
        server_thread.join();
    }
    return rc;
}

int cmd_calibrate(const std::string& path, const std::string& geometry, const std::string& out_path,
                  double radius, std::size_t min_samples) {
    const auto geom = parse_geometry(geometry);
    auto in = open_in(path);
    const auto frames = ingest::read_detection_csv(in, geom);
    std::vector<geo_auto::CalibrationSample> samples;
    for (const auto& f : frames) {
        for (const auto& d : f.detections) samples.push_back({d.box, geom});
    }
    geo_auto::FitConfig cfg;
    cfg.min_samples = min_samples;
    const auto fit = geo_auto::fit_camera_params(samples, cfg);
    const auto doc = calib::serialize_calibration(calib::auto_from_fit(fit, geom, radius));
    for (const auto& w : fit.diagnostics.warnings) std::cerr << "warning: " << w << '\n';
    if (out_path.empty()) {
        std::cout << json::parse(doc).dump(2) << '\n';
    } else {
        open_out(out_path) << json::parse(doc).dump(2) << '\n';
    }
    return 0;
}

int cmd_evaluate(const std::string& gt_path, const std::string& hyp_path, double iou) {
    auto gin = open_in(gt_path);
    auto hin = open_in(hyp_path);
    const auto m = tracker::evaluate_mot(ingest::read_identified_csv(gin),
                                         ingest::read_identified_csv(hin), iou);
    json j{{"mota", m.mota},
           {"motp", m.motp},
           {"precision", m.precision},
           {"recall", m.recall},
           {"gt", m.gt_total},
           {"matches", m.matches},
           {"false_positives", m.false_positives},
           {"misses", m.misses},
           {"id_switches", m.id_switches},
           {"trajectories", m.trajectories},
           {"mostly_tracked", m.mostly_tracked},
           {"partially_tracked", m.partially_tracked},
           {"mostly_lost", m.mostly_lost}};
    std::cout << j.dump(2) << '\n';
    return 0;
}

struct SynthArgs {
    std::uint64_t seed = 1;
    std::size_t people = 10;
    double duration = 10.0;
    std::string camera = "3.0,0.9,0.5";
    std::string geometry = "1920x1080";
    double fps = 25.0;
    double noise = 0.0;
    double drop = 0.0;
    double height_std = 0.0;
    std::string out_detections, out_gt, out_violations;
};

int cmd_synth(const SynthArgs& a) {
    synth::SceneSpec spec;
    spec.seed = a.seed;
    spec.duration_s = a.duration;
    spec.fps = a.fps;
    spec.geometry = parse_geometry(a.geometry);
    std::vector<double> cam;
    std::stringstream ss(a.camera);
    for (std::string tok; std::getline(ss, tok, ',');) cam.push_back(std::stod(tok));
    if (cam.size() != 3) throw ConfigError("camera must be x0,x1,x2 (metres, radians, radians)");
    spec.camera = {cam[0], cam[1], cam[2]};
    synth::PeopleRecipe recipe;
    recipe.count = a.people;
    recipe.height_std_m = a.height_std;
    spec.recipe = recipe;
    spec.noise = {a.noise, a.drop};
    const auto scene = synth::generate_scene(spec);
    if (!a.out_detections.empty()) {
        auto out = open_out(a.out_detections);
        synth::write_detections_csv(out, scene);
    } else {
        synth::write_detections_csv(std::cout, scene);
    }
    if (!a.out_gt.empty()) {
        auto out = open_out(a.out_gt);
        synth::write_ground_truth_csv(out, scene.ground_truth);
    }
    if (!a.out_violations.empty()) {
        auto out = open_out(a.out_violations);
        synth::write_violations_csv(out, scene);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    sigset_t set;
    sigemptyset(&set);
    sigaddset(&set, SIGINT);
    sigaddset(&set, SIGTERM);

    CLI::App app{"socdist: social-distancing analytics over detection streams"};
    app.require_subcommand(1);

    std::string config;
    int port = 0;
    auto* run = app.add_subcommand("run", "Process the feeds of a config file");
    run->add_option("--config", config, "JSON config")->required()->check(CLI::ExistingFile);
    run->add_option("--serve", port, "Serve the HTTP API on this port until interrupted");

    std::string detections, geometry, out;
    double radius = 1.0;
    std::size_t min_samples = 200;
    auto* cal = app.add_subcommand("calibrate-auto", "Fit camera height, FOV and tilt from detections");
    cal->add_option("--detections", detections, "Detection CSV")->required();
    cal->add_option("--geometry", geometry, "Frame size WxH")->required();
    cal->add_option("--out", out, "Write the calibration document here");
    cal->add_option("--radius", radius, "Proximity radius in metres");
    cal->add_option("--min-samples", min_samples, "Minimum detections required");

    std::string gt, hyp;
    double iou = 0.5;
    auto* mot = app.add_subcommand("evaluate-mot", "CLEAR-MOT metrics of a hypothesis file");
    mot->add_option("--gt", gt, "Ground-truth CSV")->required();
    mot->add_option("--hyp", hyp, "Hypothesis CSV")->required();
    mot->add_option("--iou", iou, "Match threshold");

    pipeline::CapacityInputs cap;
    auto* capc = app.add_subcommand("capacity", "Number of feeds one edge device supports");
    capc->add_option("--aip", cap.aip, "Frames/s per algorithm instance")->required();
    capc->add_option("--cores", cap.cpu_cores, "CPU cores")->required();
    capc->add_option("--gpu", cap.gpu_memory_gb, "GPU memory in GB")->required();
    capc->add_option("--sef", cap.sef, "Frames/s per streaming endpoint")->required();

    SynthArgs sa;
    auto* syn = app.add_subcommand("synth", "Generate a synthetic detection scene");
    syn->add_option("--seed", sa.seed);
    syn->add_option("--people", sa.people);
    syn->add_option("--duration", sa.duration, "Seconds");
    syn->add_option("--camera", sa.camera, "x0,x1,x2: height m, vertical FOV rad, tilt rad");
    syn->add_option("--geometry", sa.geometry, "Frame size WxH");
    syn->add_option("--fps", sa.fps);
    syn->add_option("--noise", sa.noise, "Box edge jitter std in px");
    syn->add_option("--drop", sa.drop, "Detection drop probability");
    syn->add_option("--height-std", sa.height_std, "Person height std in m");
    syn->add_option("--out-detections", sa.out_detections);
    syn->add_option("--out-gt", sa.out_gt);
    syn->add_option("--out-violations", sa.out_violations);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            if (port > 0) pthread_sigmask(SIG_BLOCK, &set, nullptr);
            return cmd_run(config, port);
        }
        if (*cal) return cmd_calibrate(detections, geometry, out, radius, min_samples);
        if (*mot) return cmd_evaluate(gt, hyp, iou);
        if (*capc) {
            std::cout << pipeline::capacity_estimate(cap) << '\n';
            return 0;
        }
        if (*syn) return cmd_synth(sa);
    } catch (const NotEnoughDataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
