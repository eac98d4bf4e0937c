#include "feedrank/http_api.hpp"

#include <csignal>
#include <pthread.h>

#include <httplib.h>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "feedrank/errors.hpp"
#include "feedrank/json_codec.hpp"
#include "feedrank/metrics.hpp"

namespace feedrank {

using nlohmann::json;

namespace {

const char* kJson = "application/json";

void send(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), kJson);
}

void send_error(httplib::Response& res, int status, std::string_view code, std::string_view message) {
    send(res, status, json{{"error", {{"code", code}, {"message", message}}}});
}

/// Maps library errors onto HTTP statuses.
template <typename Handler>
httplib::Server::Handler guarded(Handler handler) {
    return [handler](const httplib::Request& req, httplib::Response& res) {
        try {
            const std::string user_id = req.matches.size() > 1 ? std::string(req.matches[1]) : std::string();
            if (req.matches.size() > 1 && !valid_user_id(user_id)) {
                send_error(res, 400, "invalid_user", "user id must match [A-Za-z0-9._-]{1,64}");
                return;
            }
            handler(req, res, user_id);
        } catch (const SessionOpen& e) {
            send_error(res, 409, "session_open", e.what());
        } catch (const ConflictError& e) {
            send_error(res, 409, "conflict", e.what());
        } catch (const NotFound& e) {
            send_error(res, 404, "not_found", e.what());
        } catch (const ParseError& e) {
            send_error(res, 400, "parse_error", e.what());
        } catch (const InvalidInput& e) {
            send_error(res, 422, "invalid_input", e.what());
        } catch (const StorageError& e) {
            send_error(res, 503, "storage_unavailable", e.what());
        } catch (const json::exception& e) {
            send_error(res, 400, "bad_request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

json body_object(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    json body = json::parse(req.body);
    if (!body.is_object()) throw json::type_error::create(302, "request body must be a JSON object", nullptr);
    return body;
}

RankingKind parse_kind(const std::string& name) {
    if (name == "cosine") return RankingKind::Cosine;
    if (name == "binary") return RankingKind::Binary;
    if (name == "random") return RankingKind::Random;
    throw InvalidInput("unknown ranking mode '" + name + "'");
}

json feeds_json(const std::vector<FeedSource>& feeds) {
    json out = json::array();
    for (const auto& f : feeds) out.push_back(to_json(f));
    return out;
}

std::optional<double> series_trend(const std::vector<SessionMetrics>& sessions, bool r_precision) {
    std::vector<std::pair<double, double>> points;
    for (const auto& m : sessions) {
        const auto& v = r_precision ? m.r_precision : m.c_d;
        if (v) points.emplace_back(static_cast<double>(m.session_index), *v);
    }
    if (points.size() < 2) return std::nullopt;
    return trend_slope(points);
}

thread_local std::chrono::steady_clock::time_point request_started;

}  // namespace

void install_routes(httplib::Server& server, FeedService& service, FeedPoller* poller) {
    server.set_pre_routing_handler([](const httplib::Request&, httplib::Response&) {
        request_started = std::chrono::steady_clock::now();
        return httplib::Server::HandlerResponse::Unhandled;
    });
    server.set_logger([](const httplib::Request& req, const httplib::Response& res) {
        const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - request_started);
        spdlog::info(json{{"event", "request"},
                          {"method", req.method},
                          {"path", req.path},
                          {"status", res.status},
                          {"duration_ms", std::round(elapsed.count() * 1000.0) / 1000.0},
                          {"remote", req.remote_addr}}
                         .dump());
    });
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) {
        res.set_header("Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
        res.status = 204;
    });

    server.Get("/health", [](const httplib::Request&, httplib::Response& res) { send(res, 200, json{{"status", "ok"}}); });

    server.Post(R"(/users/([^/]+)/sessions)", guarded([&service](const auto& req, auto& res, const std::string& user) {
        const json body = body_object(req);
        const RankingKind kind = parse_kind(body.value("mode", std::string("cosine")));
        std::optional<std::uint64_t> seed;
        if (body.contains("seed") && !body.at("seed").is_null()) {
            if (kind != RankingKind::Random) throw InvalidInput("seed is only valid for random mode");
            seed = body.at("seed").template get<std::uint64_t>();
        }
        send(res, 201, to_json(service.start_session(user, kind, seed)));
    }));

    server.Get(R"(/users/([^/]+)/sessions/current)", guarded([&service](const auto&, auto& res, const std::string& user) {
        const auto open = service.current_session(user);
        if (!open) throw NotFound("user " + user + " has no open session");
        send(res, 200, to_json(*open));
    }));

    server.Post(R"(/users/([^/]+)/sessions/current/clicks)",
                guarded([&service](const auto& req, auto& res, const std::string& user) {
                    const json body = body_object(req);
                    service.click(user, body.at("hyperlink").template get<std::string>());
                    res.status = 204;
                }));

    server.Post(R"(/users/([^/]+)/sessions/current/end)",
                guarded([&service](const auto&, auto& res, const std::string& user) {
                    const EndedSession ended = service.end_session(user);
                    send(res, 200,
                         json{{"session_id", ended.record.session_id},
                              {"profile_version", ended.profile_version},
                              {"chosen", ended.record.chosen},
                              {"metrics", to_json(ended.metrics)}});
                }));

    server.Get(R"(/users/([^/]+)/feeds)", guarded([&service](const auto&, auto& res, const std::string& user) {
        send(res, 200, json{{"feeds", feeds_json(service.user_feeds(user))}});
    }));

    server.Post(R"(/users/([^/]+)/feeds)", guarded([&service, poller](const auto& req, auto& res, const std::string& user) {
        const json body = body_object(req);
        std::optional<std::string> title;
        if (body.contains("title") && body.at("title").is_string()) title = body.at("title").template get<std::string>();
        const FeedSource source = service.add_feed(user, body.at("url").template get<std::string>(), title);
        if (poller) poller->wake();
        send(res, 201, to_json(source));
    }));

    server.Delete(R"(/users/([^/]+)/feeds/([^/]+))", guarded([&service](const auto& req, auto& res, const std::string& user) {
        if (!service.remove_feed(user, req.matches[2])) throw NotFound("not subscribed to " + std::string(req.matches[2]));
        res.status = 204;
    }));

    server.Post(R"(/users/([^/]+)/feeds/import-opml)",
                guarded([&service, poller](const auto& req, auto& res, const std::string& user) {
                    const auto sources = service.import_opml(user, req.body);
                    if (poller) poller->wake();
                    send(res, 200, json{{"imported", sources.size()}, {"feeds", feeds_json(sources)}});
                }));

    server.Get(R"(/users/([^/]+)/metrics)", guarded([&service](const auto&, auto& res, const std::string& user) {
        const auto sessions = service.metrics(user);
        json list = json::array();
        for (const auto& m : sessions) list.push_back(to_json(m));
        auto opt = [](std::optional<double> v) { return v ? json(*v) : json(nullptr); };
        send(res, 200,
             json{{"user_id", user},
                  {"sessions", list},
                  {"trend", {{"c_d", opt(series_trend(sessions, false))}, {"r_precision", opt(series_trend(sessions, true))}}}});
    }));

    server.Get(R"(/users/([^/]+)/profile)", guarded([&service](const auto&, auto& res, const std::string& user) {
        const ProfileSnapshot snapshot = service.store().load_snapshot(user);
        json body = to_json(snapshot.profile);
        body["user_id"] = user;
        body["version"] = snapshot.version;
        send(res, 200, body);
    }));

    server.Post("/poll", guarded([&service](const auto&, auto& res, const std::string&) {
        json list = json::array();
        for (const auto& o : service.poll_once()) {
            list.push_back(json{{"feed_id", o.feed_id},
                                {"url", o.url},
                                {"parsed", o.parsed},
                                {"added", o.added},
                                {"not_modified", o.not_modified},
                                {"skipped", o.skipped},
                                {"error", o.error ? json(*o.error) : json(nullptr)}});
        }
        send(res, 200, json{{"feeds", list}});
    }));

    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) send_error(res, res.status, "http_" + std::to_string(res.status), httplib::status_message(res.status));
    });
}

int run_server(const ServiceConfig& config) {
    spdlog::set_level(spdlog::level::from_str(config.log_level));

    // Signals go to a dedicated waiter thread instead of interrupting workers.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    FeedService service(config);
    FeedPoller poller(service);
    httplib::Server server;
    install_routes(server, service, &poller);
    if (config.static_dir && !server.set_mount_point("/", config.static_dir->string())) {
        spdlog::error("static_dir {} is not a directory", config.static_dir->string());
        return 2;
    }
    if (!server.bind_to_port(config.bind_address, config.port)) {
        spdlog::error("cannot bind {}:{}", config.bind_address, config.port);
        return 1;
    }
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        spdlog::info("signal {} received, shutting down", sig);
        server.stop();
    });
    poller.start();
    spdlog::info(json{{"event", "listening"}, {"address", config.bind_address}, {"port", config.port},
                      {"data_dir", config.data_dir.string()}}
                     .dump());
    const bool ok = server.listen_after_bind();
    poller.stop();
    if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
    }
    return ok ? 0 : 1;
}

}  // namespace feedrank
