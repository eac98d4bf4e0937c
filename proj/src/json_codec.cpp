#include "feedrank/json_codec.hpp"

#include "feedrank/decimal.hpp"
#include "feedrank/errors.hpp"

namespace feedrank {

using nlohmann::json;

namespace {

json opt(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }
json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json opt_time(const std::optional<Timestamp>& v) { return v ? json(to_unix_seconds(*v)) : json(nullptr); }

std::optional<std::string> opt_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

std::optional<Timestamp> opt_timestamp(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return from_unix_seconds(j.at(key).get<std::int64_t>());
}

/// Runs a decoder, turning library exceptions into InvalidInput.
template <typename F>
auto decode(const char* what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const json::exception& e) {
        throw InvalidInput(std::string("malformed ") + what + ": " + e.what());
    }
}

}  // namespace

json to_json(const TermVector& v) {
    json out = json::object();
    for (const auto& [term, weight] : v) out[term] = format_double(weight);
    return out;
}

TermVector term_vector_from_json(const json& j) {
    return decode("term vector", [&] {
        if (!j.is_object()) throw InvalidInput("term vector must be an object");
        std::vector<TermVector::Entry> entries;
        entries.reserve(j.size());
        for (const auto& [term, weight] : j.items()) {
            if (!weight.is_string()) throw InvalidInput("weight of '" + term + "' is not a decimal string");
            entries.emplace_back(term, parse_double(weight.get<std::string>()));
        }
        return TermVector::from_entries(std::move(entries));
    });
}

json to_json(const NewsItem& item) {
    return json{{"headline", item.headline},
                {"hyperlink", item.hyperlink},
                {"summary", opt(item.summary)},
                {"feed_id", item.feed_id},
                {"fetched_at", to_unix_seconds(item.fetched_at)}};
}

NewsItem news_item_from_json(const json& j) {
    return decode("news item", [&] {
        NewsItem item;
        item.headline = j.at("headline").get<std::string>();
        item.hyperlink = j.at("hyperlink").get<std::string>();
        item.summary = opt_string(j, "summary");
        item.feed_id = j.value("feed_id", std::string());
        item.fetched_at = from_unix_seconds(j.value("fetched_at", std::int64_t{0}));
        return item;
    });
}

json to_json(const FeedSource& s) {
    return json{{"feed_id", s.feed_id},
                {"url", s.url},
                {"title", opt(s.title)},
                {"last_fetch", opt_time(s.last_fetch)},
                {"etag", opt(s.etag)},
                {"last_modified", opt(s.last_modified)},
                {"consecutive_failures", s.consecutive_failures},
                {"retry_after", opt_time(s.retry_after)}};
}

FeedSource feed_source_from_json(const json& j) {
    return decode("feed source", [&] {
        FeedSource s;
        s.feed_id = j.at("feed_id").get<std::string>();
        s.url = j.at("url").get<std::string>();
        s.title = opt_string(j, "title");
        s.last_fetch = opt_timestamp(j, "last_fetch");
        s.etag = opt_string(j, "etag");
        s.last_modified = opt_string(j, "last_modified");
        s.consecutive_failures = j.value("consecutive_failures", 0);
        s.retry_after = opt_timestamp(j, "retry_after");
        return s;
    });
}

json to_json(const RankingMode& mode) {
    json out{{"name", mode.name()}};
    if (mode.seed()) out["seed"] = *mode.seed();
    return out;
}

RankingMode ranking_mode_from_json(const json& j) {
    return decode("ranking mode", [&] {
        std::optional<std::uint64_t> seed;
        if (j.contains("seed") && !j.at("seed").is_null()) seed = j.at("seed").get<std::uint64_t>();
        return RankingMode::parse(j.at("name").get<std::string>(), seed);
    });
}

json to_json(const ScoredItem& s) {
    json out = to_json(s.item);
    out["score"] = s.score;
    out["rank"] = s.rank;
    return out;
}

ScoredItem scored_item_from_json(const json& j) {
    return decode("scored item", [&] {
        ScoredItem s;
        s.item = news_item_from_json(j);
        s.score = j.at("score").get<double>();
        s.rank = j.at("rank").get<std::size_t>();
        return s;
    });
}

json to_json(const UserProfile& p) {
    return json{{"terms", to_json(p.vector)},
                {"sessions_completed", p.sessions_completed},
                {"config", {{"a", p.config.a()}, {"b", p.config.b()}}}};
}

UserProfile user_profile_from_json(const json& j) {
    return decode("profile", [&] {
        UserProfile p;
        p.vector = term_vector_from_json(j.at("terms"));
        p.sessions_completed = j.at("sessions_completed").get<std::uint64_t>();
        const auto& c = j.at("config");
        try {
            p.config = ProfileConfig(c.at("a").get<double>(), c.at("b").get<double>());
        } catch (const ConfigError& e) {
            throw InvalidInput(e.what());
        }
        return p;
    });
}

namespace {

json offered_json(const std::vector<ScoredItem>& offered) {
    json out = json::array();
    for (const auto& s : offered) out.push_back(to_json(s));
    return out;
}

std::vector<ScoredItem> offered_from_json(const json& j) {
    std::vector<ScoredItem> out;
    for (const auto& e : j) out.push_back(scored_item_from_json(e));
    return out;
}

}  // namespace

json to_json(const OpenSession& s) {
    return json{{"session_id", s.session_id},
                {"user_id", s.user_id},
                {"mode", to_json(s.mode)},
                {"offered", offered_json(s.offered)},
                {"cosine_scores", s.cosine_scores},
                {"clicks", s.clicks},
                {"started_at", to_unix_seconds(s.started_at)},
                {"profile_version_before", s.profile_version_before}};
}

OpenSession open_session_from_json(const json& j) {
    return decode("open session", [&] {
        OpenSession s;
        s.session_id = j.at("session_id").get<std::uint64_t>();
        s.user_id = j.at("user_id").get<std::string>();
        s.mode = ranking_mode_from_json(j.at("mode"));
        s.offered = offered_from_json(j.at("offered"));
        s.cosine_scores = j.at("cosine_scores").get<std::vector<double>>();
        s.clicks = j.at("clicks").get<std::set<std::string>>();
        s.started_at = from_unix_seconds(j.at("started_at").get<std::int64_t>());
        s.profile_version_before = j.at("profile_version_before").get<std::uint64_t>();
        if (s.cosine_scores.size() != s.offered.size()) throw InvalidInput("cosine_scores length mismatch");
        return s;
    });
}

json to_json(const SessionRecord& r) {
    return json{{"session_id", r.session_id},
                {"user_id", r.user_id},
                {"mode", to_json(r.mode)},
                {"offered", offered_json(r.offered)},
                {"cosine_scores", r.cosine_scores},
                {"chosen", r.chosen},
                {"started_at", to_unix_seconds(r.started_at)},
                {"ended_at", opt_time(r.ended_at)},
                {"profile_version_before", r.profile_version_before},
                {"profile_version_after",
                 r.profile_version_after ? json(*r.profile_version_after) : json(nullptr)}};
}

SessionRecord session_record_from_json(const json& j) {
    return decode("session record", [&] {
        SessionRecord r;
        r.session_id = j.at("session_id").get<std::uint64_t>();
        r.user_id = j.at("user_id").get<std::string>();
        r.mode = ranking_mode_from_json(j.at("mode"));
        r.offered = offered_from_json(j.at("offered"));
        r.cosine_scores = j.at("cosine_scores").get<std::vector<double>>();
        r.chosen = j.at("chosen").get<std::set<std::string>>();
        r.started_at = from_unix_seconds(j.at("started_at").get<std::int64_t>());
        r.ended_at = opt_timestamp(j, "ended_at");
        r.profile_version_before = j.at("profile_version_before").get<std::uint64_t>();
        if (j.contains("profile_version_after") && !j.at("profile_version_after").is_null()) {
            r.profile_version_after = j.at("profile_version_after").get<std::uint64_t>();
        }
        if (r.cosine_scores.size() != r.offered.size()) throw InvalidInput("cosine_scores length mismatch");
        return r;
    });
}

json to_json(const SessionMetrics& m) {
    return json{{"session_index", m.session_index},
                {"mode", kind_name(m.mode)},
                {"n_chosen", m.n_chosen},
                {"mean_chosen_score", opt(m.mean_chosen_score)},
                {"max_mean_score", opt(m.max_mean_score)},
                {"c_d", opt(m.c_d)},
                {"r_precision", opt(m.r_precision)}};
}

}  // namespace feedrank
