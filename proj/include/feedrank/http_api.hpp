#pragma once

#include "feedrank/config.hpp"
#include "feedrank/service.hpp"

namespace httplib {
class Server;
}

namespace feedrank {

/// Registers the JSON endpoints:
///
///   GET    /health
///   POST   /users/{id}/sessions                  {"mode": "cosine"|"binary"|"random", "seed"?: n}
///   GET    /users/{id}/sessions/current
///   POST   /users/{id}/sessions/current/clicks   {"hyperlink": "..."}
///   POST   /users/{id}/sessions/current/end
///   GET    /users/{id}/feeds
///   POST   /users/{id}/feeds                     {"url": "...", "title"?: "..."}
///   DELETE /users/{id}/feeds/{feed_id}
///   POST   /users/{id}/feeds/import-opml         raw OPML body
///   GET    /users/{id}/metrics
///   GET    /users/{id}/profile
///   POST   /poll                                 runs a fetch round now
///
/// `poller` may be null; /poll then fetches synchronously.
void install_routes(httplib::Server& server, FeedService& service, FeedPoller* poller);

/// Runs the service until SIGINT or SIGTERM. Returns a process exit code.
int run_server(const ServiceConfig& config);

}  // namespace feedrank
