#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

namespace feedrank {

using Timestamp = std::chrono::sys_seconds;

inline Timestamp from_unix_seconds(std::int64_t s) { return Timestamp(std::chrono::seconds(s)); }
inline std::int64_t to_unix_seconds(Timestamp t) { return t.time_since_epoch().count(); }

/// One syndicated entry. The hyperlink is the item's identity.
struct NewsItem {
    std::string headline;
    std::string hyperlink;
    std::optional<std::string> summary;
    std::string feed_id;
    Timestamp fetched_at{};

    friend bool operator==(const NewsItem&, const NewsItem&) = default;
};

/// A subscribed feed plus the HTTP validators from its last successful fetch.
struct FeedSource {
    std::string feed_id;
    std::string url;
    std::optional<std::string> title;
    std::optional<Timestamp> last_fetch;
    std::optional<std::string> etag;
    std::optional<std::string> last_modified;
    // Backoff state after network failures.
    int consecutive_failures = 0;
    std::optional<Timestamp> retry_after;

    friend bool operator==(const FeedSource&, const FeedSource&) = default;
};

}  // namespace feedrank
