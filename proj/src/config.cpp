#include "feedrank/config.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "feedrank/errors.hpp"

extern char** environ;

namespace feedrank {

using nlohmann::json;

namespace {

constexpr std::string_view kPrefix = "FEEDRANK_";

std::string env_name(std::string_view key) {
    std::string out(kPrefix);
    for (char c : key) out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

/// Environment values arrive as text; coerce them to the JSON type the key expects.
json coerce(const std::string& key, const std::string& value, const json& current) {
    if (current.is_string() || current.is_null()) return value;
    try {
        return json::parse(value);
    } catch (const json::exception&) {
        throw ConfigError("environment value for " + env_name(key) + " is not valid: '" + value + "'");
    }
}

template <typename T>
T get(const json& doc, const char* key) {
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config key '") + key + "': " + e.what());
    }
}

std::size_t get_count(const json& doc, const char* key) {
    if (!doc.at(key).is_number_unsigned()) throw ConfigError(std::string("config key '") + key + "' must be a non-negative integer");
    return doc.at(key).get<std::size_t>();
}

}  // namespace

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535) throw ConfigError("port must lie in [0, 65535]");
    if (poll_interval.count() <= 0) throw ConfigError("poll_interval_seconds must be positive");
    if (page_size == 0) throw ConfigError("page_size must be positive");
    if (item_horizon.count() <= 0) throw ConfigError("item_horizon_hours must be positive");
    if (fetch_timeout.count() <= 0) throw ConfigError("fetch_timeout_ms must be positive");
    if (fetch_concurrency == 0) throw ConfigError("fetch_concurrency must be positive");
    if (data_dir.empty()) throw ConfigError("data_dir must not be empty");
}

Environment process_environment() {
    Environment env;
    for (char** e = environ; e != nullptr && *e != nullptr; ++e) {
        std::string_view entry(*e);
        if (!entry.starts_with(kPrefix)) continue;
        const auto eq = entry.find('=');
        if (eq == std::string_view::npos) continue;
        env.emplace(std::string(entry.substr(0, eq)), std::string(entry.substr(eq + 1)));
    }
    return env;
}

ServiceConfig parse_service_config(std::string_view json_text, const Environment& env) {
    const ServiceConfig defaults;
    json doc{{"bind_address", defaults.bind_address},
             {"port", defaults.port},
             {"poll_interval_seconds", defaults.poll_interval.count()},
             {"page_size", defaults.page_size},
             {"a", defaults.profile.a()},
             {"b", defaults.profile.b()},
             {"stopwords_path", nullptr},
             {"data_dir", defaults.data_dir.string()},
             {"item_horizon_hours", defaults.item_horizon.count()},
             {"fetch_timeout_ms", defaults.fetch_timeout.count()},
             {"fetch_concurrency", defaults.fetch_concurrency},
             {"static_dir", nullptr},
             {"log_level", defaults.log_level}};

    if (!json_text.empty()) {
        json file;
        try {
            file = json::parse(json_text);
        } catch (const json::parse_error& e) {
            throw ConfigError(std::string("config is not valid JSON: ") + e.what());
        }
        if (!file.is_object()) throw ConfigError("config must be a JSON object");
        for (const auto& [key, value] : file.items()) {
            if (doc.contains(key)) doc[key] = value;  // unknown keys are ignored
        }
    }
    for (auto& [key, value] : doc.items()) {
        if (auto it = env.find(env_name(key)); it != env.end()) value = coerce(key, it->second, value);
    }

    ServiceConfig cfg;
    cfg.bind_address = get<std::string>(doc, "bind_address");
    cfg.port = get<int>(doc, "port");
    cfg.poll_interval = std::chrono::seconds(get<std::int64_t>(doc, "poll_interval_seconds"));
    cfg.page_size = get_count(doc, "page_size");
    cfg.profile = ProfileConfig(get<double>(doc, "a"), get<double>(doc, "b"));
    if (!doc.at("stopwords_path").is_null()) cfg.stopwords_path = get<std::string>(doc, "stopwords_path");
    cfg.data_dir = get<std::string>(doc, "data_dir");
    cfg.item_horizon = std::chrono::hours(get<std::int64_t>(doc, "item_horizon_hours"));
    cfg.fetch_timeout = std::chrono::milliseconds(get<std::int64_t>(doc, "fetch_timeout_ms"));
    cfg.fetch_concurrency = get_count(doc, "fetch_concurrency");
    if (!doc.at("static_dir").is_null()) cfg.static_dir = get<std::string>(doc, "static_dir");
    cfg.log_level = get<std::string>(doc, "log_level");
    cfg.validate();
    return cfg;
}

ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file, const Environment& env) {
    std::string text;
    if (file) {
        std::ifstream in(*file);
        if (!in) throw ConfigError("cannot read config file " + file->string());
        std::stringstream buf;
        buf << in.rdbuf();
        text = buf.str();
    }
    return parse_service_config(text, env);
}

}  // namespace feedrank
