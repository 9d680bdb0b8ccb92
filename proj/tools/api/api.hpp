#pragma once

#include <memory>

#include "socdist/pipeline.hpp"
#include "httplib.h"

namespace socdist::api {

/// Routes for the feed manager. The manager must outlive the server.
void register_routes(httplib::Server& server, const pipeline::FeedManager& manager);

std::unique_ptr<httplib::Server> make_server(const pipeline::FeedManager& manager);

}  // namespace socdist::api
