#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>

#include "feedrank/profile.hpp"

namespace feedrank {

/// Settings shared by `serve`, `fetch`, `rank` and `replay`.
///
/// JSON file keys (all optional): bind_address, port, poll_interval_seconds,
/// page_size, a, b, stopwords_path, data_dir, item_horizon_hours,
/// fetch_timeout_ms, fetch_concurrency, static_dir, log_level.
/// Environment overrides use the FEEDRANK_ prefix and upper-case key names,
/// e.g. FEEDRANK_PORT=9000 or FEEDRANK_DATA_DIR=/srv/feeds.
struct ServiceConfig {
    std::string bind_address = "127.0.0.1";
    int port = 8080;
    std::chrono::seconds poll_interval{900};
    std::size_t page_size = 14;
    ProfileConfig profile;
    std::optional<std::filesystem::path> stopwords_path;
    std::filesystem::path data_dir = "feedrank-data";
    std::chrono::hours item_horizon{24 * 7};
    std::chrono::milliseconds fetch_timeout{15000};
    std::size_t fetch_concurrency = 4;
    std::optional<std::filesystem::path> static_dir;
    std::string log_level = "info";

    void validate() const;
};

using Environment = std::map<std::string, std::string>;

/// Snapshot of the FEEDRANK_* process environment.
Environment process_environment();

/// Defaults, then the file (if given), then the environment. Throws ConfigError.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file,
                                  const Environment& env = {});

ServiceConfig parse_service_config(std::string_view json_text, const Environment& env = {});

}  // namespace feedrank
