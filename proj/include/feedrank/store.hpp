#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "feedrank/news_item.hpp"
#include "feedrank/session.hpp"

namespace feedrank {

inline constexpr int kSchemaVersion = 1;

/// Directory-backed persistence. Layout under the root:
///
///   feeds.json                     subscribed sources and fetch state
///   feeds/<feed_id>.jsonl          item cache, one NewsItem per line
///   users/<user_id>/journal.jsonl  one line per finished session, carrying the
///                                  profile snapshot it produced
///   users/<user_id>/open_session.json
///   users/<user_id>/subscriptions.json
///
/// Appends are committed by their trailing newline; a torn last line is ignored
/// on read and cut off before the next append. Whole-file writes go through a
/// temporary file and rename.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path root, ProfileConfig default_config = {});

    const std::filesystem::path& root() const noexcept { return root_; }

    /// Latest snapshot; a fresh user gets version 0 with an empty profile.
    ProfileSnapshot load_snapshot(const std::string& user_id) const;
    UserProfile load_profile(const std::string& user_id) const;
    std::vector<SessionRecord> list_sessions(const std::string& user_id) const;
    std::vector<std::string> list_users() const;

    /// Commits a finished session. `profile_after` is required when something
    /// was chosen and must be absent otherwise. Assigns session_id when it is 0.
    /// Throws ConflictError when the profile version or session id moved,
    /// InvalidInput for an incomplete record, StorageError on I/O failure.
    SessionRecord append_session(SessionRecord record, const std::optional<UserProfile>& profile_after);

    std::optional<OpenSession> load_open_session(const std::string& user_id) const;
    void save_open_session(const OpenSession& session);
    void clear_open_session(const std::string& user_id);

    std::vector<FeedSource> list_feeds() const;
    std::optional<FeedSource> find_feed(const std::string& feed_id) const;
    void upsert_feed(const FeedSource& source);
    /// Updates fetch state of an existing source; a no-op if it was removed meanwhile.
    void update_feed_state(const FeedSource& source);
    void remove_feed(const std::string& feed_id);

    std::vector<std::string> subscriptions(const std::string& user_id) const;
    void subscribe(const std::string& user_id, const std::string& feed_id);
    /// Returns false when the user was not subscribed.
    bool unsubscribe(const std::string& user_id, const std::string& feed_id);

    /// Appends items not yet cached for the feed; returns how many were new.
    std::size_t store_items(const std::string& feed_id, std::span<const NewsItem> items);
    /// Cached items with fetched_at >= since, in arrival order.
    std::vector<NewsItem> load_items(const std::string& feed_id,
                                     std::optional<Timestamp> since = std::nullopt) const;

    /// Serializes all mutations of one user's state.
    std::unique_lock<std::shared_mutex> lock_user(const std::string& user_id) const;

private:
    std::shared_mutex& user_mutex(const std::string& user_id) const;
    std::mutex& journal_mutex(const std::string& user_id) const;
    std::filesystem::path user_dir(const std::string& user_id) const;

    std::filesystem::path root_;
    ProfileConfig default_config_;
    mutable std::mutex registry_mutex_;
    mutable std::map<std::string, std::unique_ptr<std::shared_mutex>> user_mutexes_;
    mutable std::map<std::string, std::unique_ptr<std::mutex>> journal_mutexes_;
    mutable std::mutex feeds_mutex_;
    mutable std::mutex items_mutex_;
};

/// Checks that a user id is safe to use as a directory name.
bool valid_user_id(std::string_view user_id);

}  // namespace feedrank
