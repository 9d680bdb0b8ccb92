#include "api.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "socdist/error.hpp"

namespace socdist::api {
using nlohmann::json;
using pipeline::FeedState;

namespace {

constexpr const char* kJson = "application/json";

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, const std::string& message) {
    send_json(res, status, {{"error", message}});
}

std::shared_ptr<FeedState> lookup(const pipeline::FeedManager& m, const httplib::Request& req,
                                  httplib::Response& res) {
    const std::string id = req.matches[1];
    auto feed = m.find(id);
    if (!feed) send_error(res, 404, "unknown feed '" + id + "'");
    return feed;
}

double query_number(const httplib::Request& req, const std::string& key) {
    if (!req.has_param(key)) throw ConfigError("missing query parameter '" + key + "'");
    const std::string v = req.get_param_value(key);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("query parameter '" + key + "' is not a number");
    }
    return out;
}

std::string content_type_for(const std::filesystem::path& p) {
    auto ext = p.extension().string();
    for (auto& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (ext == ".png") return "image/png";
    if (ext == ".jpg" || ext == ".jpeg") return "image/jpeg";
    if (ext == ".bmp") return "image/bmp";
    if (ext == ".webp") return "image/webp";
    return "application/octet-stream";
}

json feed_summary(const FeedState& s) {
    const auto& cfg = s.config();
    json j{{"id", cfg.id},
           {"status", pipeline::to_string(s.status())},
           {"live", cfg.live()},
           {"fps", cfg.fps},
           {"geometry", {{"w", cfg.geometry.width}, {"h", cfg.geometry.height}}},
           {"frames", s.frames()},
           {"dropped", s.dropped()},
           {"has_frame", cfg.still_frame.has_value()}};
    if (const auto cal = s.calibration_json()) {
        j["calibration_mode"] = json::parse(*cal).value("mode", "");
    } else {
        j["calibration_mode"] = nullptr;
    }
    if (const auto err = s.error(); !err.empty()) j["error"] = err;
    return j;
}

}  // namespace

void register_routes(httplib::Server& server, const pipeline::FeedManager& manager) {
    const auto* m = &manager;

    server.Get("/feeds", [m](const httplib::Request&, httplib::Response& res) {
        json list = json::array();
        for (const auto& f : m->feeds()) list.push_back(feed_summary(*f));
        send_json(res, 200, {{"feeds", list}});
    });

    server.Get(R"(/feeds/([^/]+)/frame)", [m](const httplib::Request& req, httplib::Response& res) {
        auto feed = lookup(*m, req, res);
        if (!feed) return;
        const auto& still = feed->config().still_frame;
        if (!still) return send_error(res, 404, "feed has no still frame configured");
        std::ifstream in(*still, std::ios::binary);
        if (!in) return send_error(res, 404, "still frame not readable: " + still->string());
        std::stringstream ss;
        ss << in.rdbuf();
        res.set_content(ss.str(), content_type_for(*still));
    });

    server.Get(R"(/feeds/([^/]+)/calibration)",
               [m](const httplib::Request& req, httplib::Response& res) {
                   auto feed = lookup(*m, req, res);
                   if (!feed) return;
                   const auto cal = feed->calibration_json();
                   if (!cal) return send_error(res, 404, "feed has no calibration");
                   res.set_content(*cal, kJson);
               });

    server.Post(R"(/feeds/([^/]+)/calibration)",
                [m](const httplib::Request& req, httplib::Response& res) {
                    auto feed = lookup(*m, req, res);
                    if (!feed) return;
                    try {
                        feed->set_calibration(req.body);
                    } catch (const calib::DocumentError& e) {
                        json errors = json::array();
                        for (const auto& f : e.fields()) {
                            errors.push_back({{"field", f.field}, {"message", f.message}});
                        }
                        return send_json(res, 422, {{"error", e.what()}, {"errors", errors}});
                    } catch (const Error& e) {
                        return send_json(res, 422, {{"error", e.what()}, {"errors", json::array()}});
                    }
                    send_json(res, 200,
                              {{"accepted", true},
                               {"calibration", json::parse(*feed->calibration_json())}});
                });

    server.Get(R"(/feeds/([^/]+)/metrics)", [m](const httplib::Request& req, httplib::Response& res) {
        auto feed = lookup(*m, req, res);
        if (!feed) return;
        double horizon = m->config().engine.horizon_s;
        try {
            if (req.has_param("horizon")) horizon = query_number(req, "horizon");
            if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
        } catch (const ConfigError& e) {
            return send_error(res, 400, e.what());
        }
        const auto history = feed->history();
        auto body = json::parse(pipeline::rolling_json(compliance::rolling_metrics(history, horizon)));
        body["feed"] = feed->config().id;
        body["horizon_s"] = horizon;
        send_json(res, 200, body);
    });

    server.Get(R"(/feeds/([^/]+)/overlay)", [m](const httplib::Request& req, httplib::Response& res) {
        auto feed = lookup(*m, req, res);
        if (!feed) return;
        std::uint64_t from = 0;
        if (req.has_param("from")) {
            const auto v = req.get_param_value("from");
            std::from_chars(v.data(), v.data() + v.size(), from);
        }
        auto cursor = std::make_shared<std::uint64_t>(from);
        res.set_chunked_content_provider(
            "application/x-ndjson", [feed, cursor](std::size_t, httplib::DataSink& sink) {
                while (true) {
                    std::uint64_t next = *cursor;
                    const auto lines = feed->overlay_since(*cursor, next);
                    *cursor = next;
                    if (!lines.empty()) {
                        std::string chunk;
                        for (const auto& l : lines) chunk += l + '\n';
                        return sink.write(chunk.data(), chunk.size());
                    }
                    if (!feed->active()) {
                        sink.done();
                        return true;
                    }
                    if (!sink.is_writable()) return false;
                    feed->wait_overlay(*cursor, std::chrono::milliseconds(250));
                }
            });
    });

    server.Get("/capacity", [](const httplib::Request& req, httplib::Response& res) {
        try {
            pipeline::CapacityInputs c{query_number(req, "aip"), query_number(req, "cores"),
                                       query_number(req, "gpu"), query_number(req, "sef")};
            send_json(res, 200,
                      {{"capacity", pipeline::capacity_estimate(c)},
                       {"maxal", std::min(c.cpu_cores, c.gpu_memory_gb)}});
        } catch (const ConfigError& e) {
            send_error(res, 400, e.what());
        }
    });
}

std::unique_ptr<httplib::Server> make_server(const pipeline::FeedManager& manager) {
    auto server = std::make_unique<httplib::Server>();
    register_routes(*server, manager);
    return server;
}

}  // namespace socdist::api
