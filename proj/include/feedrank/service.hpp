#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "feedrank/config.hpp"
#include "feedrank/errors.hpp"
#include "feedrank/feed.hpp"
#include "feedrank/session.hpp"
#include "feedrank/store.hpp"
#include "feedrank/text_model.hpp"

namespace feedrank {

/// Raised when a user already has an open session.
class SessionOpen : public ConflictError {
public:
    using ConflictError::ConflictError;
};

struct EndedSession {
    SessionRecord record;
    SessionMetrics metrics;
    std::uint64_t profile_version = 0;
};

struct PollOutcome {
    std::string feed_id;
    std::string url;
    std::size_t parsed = 0;
    std::size_t added = 0;
    bool not_modified = false;
    bool skipped = false;  // still backing off
    std::optional<std::string> error;
};

/// Seed a random-mode session gets when the caller supplies none.
std::uint64_t session_seed(std::string_view user_id, std::uint64_t session_id);

using Clock = std::function<Timestamp()>;
Timestamp system_now();

/// The read, click, re-rank loop over a SessionStore. Thread-safe; mutations of
/// one user are serialized.
class FeedService {
public:
    explicit FeedService(ServiceConfig config, Clock clock = system_now);

    const ServiceConfig& config() const noexcept { return config_; }
    SessionStore& store() noexcept { return store_; }
    const Tokenizer& tokenizer() const noexcept { return tokenizer_; }

    /// Unread items eligible for the next page.
    std::vector<NewsItem> candidates(const std::string& user_id) const;

    /// Ranked page plus the cosine score of every offered item, without opening a session.
    std::pair<std::vector<ScoredItem>, std::vector<double>> preview(const std::string& user_id,
                                                                    const RankingMode& mode,
                                                                    std::size_t page_size) const;

    /// Throws SessionOpen if one is already open. A random mode without a seed
    /// gets one derived from the user and session number.
    OpenSession start_session(const std::string& user_id, RankingKind kind,
                              std::optional<std::uint64_t> seed = std::nullopt);
    /// Seed start_session would pick for the user's next random session.
    std::uint64_t next_session_seed(const std::string& user_id) const;
    std::optional<OpenSession> current_session(const std::string& user_id) const;
    /// Idempotent. Throws NotFound without an open session, InvalidInput for a link not offered.
    void click(const std::string& user_id, const std::string& hyperlink);
    /// Folds the clicks into the profile and journals the session. Throws NotFound.
    EndedSession end_session(const std::string& user_id);

    std::vector<SessionMetrics> metrics(const std::string& user_id) const;

    std::vector<FeedSource> user_feeds(const std::string& user_id) const;
    FeedSource add_feed(const std::string& user_id, const std::string& url,
                        std::optional<std::string> title = std::nullopt);
    /// Returns false when the user was not subscribed.
    bool remove_feed(const std::string& user_id, const std::string& feed_id);
    std::vector<FeedSource> import_opml(const std::string& user_id, std::string_view document);

    /// Fetches every due source once, up to fetch_concurrency at a time.
    std::vector<PollOutcome> poll_once();

private:
    PollOutcome poll_source(const FeedSource& source);

    ServiceConfig config_;
    Clock clock_;
    SessionStore store_;
    Tokenizer tokenizer_;
    std::mutex poll_mutex_;  // one poll round at a time, so one fetch per source
};

/// Background thread calling poll_once every poll interval.
class FeedPoller {
public:
    explicit FeedPoller(FeedService& service);
    ~FeedPoller();
    FeedPoller(const FeedPoller&) = delete;
    FeedPoller& operator=(const FeedPoller&) = delete;

    void start();
    void stop();
    /// Runs a round now instead of waiting for the interval.
    void wake();

private:
    void run();

    FeedService& service_;
    std::thread thread_;
    std::mutex mutex_;
    std::condition_variable cv_;
    bool stopping_ = false;
    bool woken_ = false;
};

}  // namespace feedrank
