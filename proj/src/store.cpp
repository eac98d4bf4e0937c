#include "feedrank/store.hpp"

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <random>
#include <sstream>

#include <fcntl.h>
#include <unistd.h>

#include <nlohmann/json.hpp>

#include "feedrank/errors.hpp"
#include "feedrank/json_codec.hpp"

namespace feedrank {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what, const fs::path& path) {
    throw StorageError(what + " " + path.string() + ": " + std::strerror(errno));
}

class Fd {
public:
    explicit Fd(int fd) : fd_(fd) {}
    Fd(const Fd&) = delete;
    Fd& operator=(const Fd&) = delete;
    ~Fd() {
        if (fd_ >= 0) ::close(fd_);
    }
    int get() const { return fd_; }

private:
    int fd_;
};

void write_all(int fd, std::string_view data, const fs::path& path) {
    while (!data.empty()) {
        const ssize_t n = ::write(fd, data.data(), data.size());
        if (n < 0) {
            if (errno == EINTR) continue;
            fail("cannot write", path);
        }
        data.remove_prefix(static_cast<std::size_t>(n));
    }
}

void sync_directory(const fs::path& dir) {
    Fd fd(::open(dir.c_str(), O_RDONLY | O_DIRECTORY));
    if (fd.get() >= 0) ::fsync(fd.get());
}

void ensure_directory(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw StorageError("cannot create " + dir.string() + ": " + ec.message());
}

std::optional<std::string> read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        if (!fs::exists(path)) return std::nullopt;
        fail("cannot read", path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Replaces `path` so that readers see either the old or the new content.
void write_file_atomic(const fs::path& path, std::string_view content) {
    ensure_directory(path.parent_path());
    static thread_local std::mt19937_64 salt(std::random_device{}());
    const fs::path tmp = path.string() + ".tmp." + std::to_string(salt());
    {
        Fd fd(::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644));
        if (fd.get() < 0) fail("cannot create", tmp);
        write_all(fd.get(), content, tmp);
        if (::fsync(fd.get()) != 0) fail("cannot sync", tmp);
    }
    if (::rename(tmp.c_str(), path.c_str()) != 0) {
        ::unlink(tmp.c_str());
        fail("cannot replace", path);
    }
    sync_directory(path.parent_path());
}

/// Complete lines of a line-delimited file plus the byte length they span.
struct CommittedLines {
    std::vector<std::string_view> lines;
    std::size_t committed_bytes = 0;
    std::size_t file_bytes = 0;
};

CommittedLines committed_lines(const std::string& content) {
    CommittedLines out;
    out.file_bytes = content.size();
    std::size_t start = 0;
    for (std::size_t nl = content.find('\n'); nl != std::string::npos; nl = content.find('\n', start)) {
        if (nl > start) out.lines.emplace_back(content.data() + start, nl - start);
        start = nl + 1;
    }
    out.committed_bytes = start;
    return out;
}

/// Appends one line, first cutting off any torn tail left by an interrupted write.
void append_line(const fs::path& path, std::size_t committed_bytes, std::size_t file_bytes,
                 const std::string& line) {
    ensure_directory(path.parent_path());
    Fd fd(::open(path.c_str(), O_WRONLY | O_CREAT, 0644));
    if (fd.get() < 0) fail("cannot open", path);
    if (file_bytes != committed_bytes && ::ftruncate(fd.get(), static_cast<off_t>(committed_bytes)) != 0) {
        fail("cannot truncate", path);
    }
    if (::lseek(fd.get(), static_cast<off_t>(committed_bytes), SEEK_SET) < 0) fail("cannot seek", path);
    write_all(fd.get(), line + "\n", path);
    if (::fsync(fd.get()) != 0) fail("cannot sync", path);
}

json parse_line(std::string_view line, const fs::path& path) {
    try {
        json j = json::parse(line);
        const int version = j.value("schema_version", 0);
        if (version != kSchemaVersion) {
            throw StorageError("unsupported schema_version " + std::to_string(version) + " in " + path.string());
        }
        return j;
    } catch (const json::exception& e) {
        throw StorageError("corrupt record in " + path.string() + ": " + e.what());
    }
}

json parse_document(const std::string& content, const fs::path& path) {
    return parse_line(content, path);
}

struct Journal {
    std::vector<SessionRecord> sessions;
    std::optional<ProfileSnapshot> snapshot;
    std::size_t committed_bytes = 0;
    std::size_t file_bytes = 0;
};

Journal read_journal(const fs::path& path, const std::string& user_id) {
    Journal journal;
    const auto content = read_file(path);
    if (!content) return journal;
    const auto lines = committed_lines(*content);
    journal.committed_bytes = lines.committed_bytes;
    journal.file_bytes = lines.file_bytes;
    for (const auto line : lines.lines) {
        const json j = parse_line(line, path);
        try {
            journal.sessions.push_back(session_record_from_json(j.at("session")));
            if (const auto& snap = j.at("snapshot"); !snap.is_null()) {
                ProfileSnapshot s;
                s.user_id = user_id;
                s.version = snap.at("version").get<std::uint64_t>();
                s.profile = user_profile_from_json(snap.at("profile"));
                journal.snapshot = std::move(s);
            }
        } catch (const Error& e) {
            throw StorageError("corrupt record in " + path.string() + ": " + e.what());
        } catch (const json::exception& e) {
            throw StorageError("corrupt record in " + path.string() + ": " + e.what());
        }
    }
    return journal;
}

bool valid_name(std::string_view name) {
    if (name.empty() || name.size() > 128 || name == "." || name == "..") return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '-' || c == '_' || c == '.';
    });
}

void require_user(std::string_view user_id) {
    if (!valid_user_id(user_id)) throw InvalidInput("invalid user id '" + std::string(user_id) + "'");
}

void require_feed(std::string_view feed_id) {
    if (!valid_name(feed_id)) throw InvalidInput("invalid feed id '" + std::string(feed_id) + "'");
}

}  // namespace

bool valid_user_id(std::string_view user_id) { return valid_name(user_id) && user_id.size() <= 64; }

SessionStore::SessionStore(fs::path root, ProfileConfig default_config)
    : root_(std::move(root)), default_config_(default_config) {
    ensure_directory(root_ / "users");
    ensure_directory(root_ / "feeds");
}

fs::path SessionStore::user_dir(const std::string& user_id) const {
    require_user(user_id);
    return root_ / "users" / user_id;
}

std::shared_mutex& SessionStore::user_mutex(const std::string& user_id) const {
    std::lock_guard guard(registry_mutex_);
    auto& slot = user_mutexes_[user_id];
    if (!slot) slot = std::make_unique<std::shared_mutex>();
    return *slot;
}

std::mutex& SessionStore::journal_mutex(const std::string& user_id) const {
    std::lock_guard guard(registry_mutex_);
    auto& slot = journal_mutexes_[user_id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

std::unique_lock<std::shared_mutex> SessionStore::lock_user(const std::string& user_id) const {
    require_user(user_id);
    return std::unique_lock(user_mutex(user_id));
}

ProfileSnapshot SessionStore::load_snapshot(const std::string& user_id) const {
    auto journal = read_journal(user_dir(user_id) / "journal.jsonl", user_id);
    if (journal.snapshot) return std::move(*journal.snapshot);
    ProfileSnapshot fresh;
    fresh.user_id = user_id;
    fresh.profile.config = default_config_;
    return fresh;
}

UserProfile SessionStore::load_profile(const std::string& user_id) const {
    return load_snapshot(user_id).profile;
}

std::vector<SessionRecord> SessionStore::list_sessions(const std::string& user_id) const {
    return read_journal(user_dir(user_id) / "journal.jsonl", user_id).sessions;
}

std::vector<std::string> SessionStore::list_users() const {
    std::vector<std::string> users;
    std::error_code ec;
    for (const auto& entry : fs::directory_iterator(root_ / "users", ec)) {
        const std::string name = entry.path().filename().string();
        if (entry.is_directory() && valid_user_id(name)) users.push_back(name);
    }
    std::sort(users.begin(), users.end());
    return users;
}

SessionRecord SessionStore::append_session(SessionRecord record, const std::optional<UserProfile>& profile_after) {
    require_user(record.user_id);
    if (!record.ended_at) throw InvalidInput("session record has no ended_at");
    if (record.cosine_scores.size() != record.offered.size()) {
        throw InvalidInput("cosine_scores must parallel the offered list");
    }
    for (const auto& link : record.chosen) {
        const bool offered = std::any_of(record.offered.begin(), record.offered.end(),
                                         [&](const ScoredItem& s) { return s.item.hyperlink == link; });
        if (!offered) throw InvalidInput("chosen hyperlink was not offered: " + link);
    }
    if (record.chosen.empty() == profile_after.has_value()) {
        throw InvalidInput(record.chosen.empty() ? "empty session cannot change the profile"
                                                 : "session with choices needs the updated profile");
    }

    std::lock_guard guard(journal_mutex(record.user_id));
    const fs::path path = user_dir(record.user_id) / "journal.jsonl";
    const Journal journal = read_journal(path, record.user_id);
    const std::uint64_t current_version = journal.snapshot ? journal.snapshot->version : 0;
    const std::uint64_t next_id = journal.sessions.empty() ? 1 : journal.sessions.back().session_id + 1;

    if (record.profile_version_before != current_version) {
        throw ConflictError("profile moved from version " + std::to_string(record.profile_version_before) +
                            " to " + std::to_string(current_version));
    }
    if (record.session_id == 0) record.session_id = next_id;
    if (record.session_id != next_id) {
        throw ConflictError("session " + std::to_string(record.session_id) + " is not the next session (" +
                            std::to_string(next_id) + ")");
    }
    record.profile_version_after = profile_after ? current_version + 1 : current_version;

    json line{{"schema_version", kSchemaVersion}, {"session", to_json(record)}, {"snapshot", nullptr}};
    if (profile_after) {
        line["snapshot"] = {{"version", *record.profile_version_after}, {"profile", to_json(*profile_after)}};
    }
    append_line(path, journal.committed_bytes, journal.file_bytes, line.dump());
    return record;
}

std::optional<OpenSession> SessionStore::load_open_session(const std::string& user_id) const {
    const fs::path path = user_dir(user_id) / "open_session.json";
    const auto content = read_file(path);
    if (!content) return std::nullopt;
    const json j = parse_document(*content, path);
    try {
        return open_session_from_json(j.at("session"));
    } catch (const Error& e) {
        throw StorageError("corrupt open session in " + path.string() + ": " + e.what());
    } catch (const json::exception& e) {
        throw StorageError("corrupt open session in " + path.string() + ": " + e.what());
    }
}

void SessionStore::save_open_session(const OpenSession& session) {
    const json doc{{"schema_version", kSchemaVersion}, {"session", to_json(session)}};
    write_file_atomic(user_dir(session.user_id) / "open_session.json", doc.dump());
}

void SessionStore::clear_open_session(const std::string& user_id) {
    const fs::path path = user_dir(user_id) / "open_session.json";
    if (::unlink(path.c_str()) != 0 && errno != ENOENT) fail("cannot remove", path);
    sync_directory(path.parent_path());
}

namespace {

std::vector<FeedSource> read_feeds(const fs::path& path) {
    const auto content = read_file(path);
    if (!content) return {};
    const json j = parse_document(*content, path);
    std::vector<FeedSource> feeds;
    try {
        for (const auto& f : j.at("feeds")) feeds.push_back(feed_source_from_json(f));
    } catch (const Error& e) {
        throw StorageError("corrupt feed registry " + path.string() + ": " + e.what());
    } catch (const json::exception& e) {
        throw StorageError("corrupt feed registry " + path.string() + ": " + e.what());
    }
    return feeds;
}

void write_feeds(const fs::path& path, const std::vector<FeedSource>& feeds) {
    json list = json::array();
    for (const auto& f : feeds) list.push_back(to_json(f));
    write_file_atomic(path, json{{"schema_version", kSchemaVersion}, {"feeds", list}}.dump(1));
}

}  // namespace

std::vector<FeedSource> SessionStore::list_feeds() const {
    std::lock_guard guard(feeds_mutex_);
    return read_feeds(root_ / "feeds.json");
}

std::optional<FeedSource> SessionStore::find_feed(const std::string& feed_id) const {
    for (auto& f : list_feeds()) {
        if (f.feed_id == feed_id) return f;
    }
    return std::nullopt;
}

void SessionStore::upsert_feed(const FeedSource& source) {
    require_feed(source.feed_id);
    std::lock_guard guard(feeds_mutex_);
    auto feeds = read_feeds(root_ / "feeds.json");
    auto it = std::find_if(feeds.begin(), feeds.end(), [&](const FeedSource& f) { return f.feed_id == source.feed_id; });
    if (it == feeds.end()) feeds.push_back(source);
    else *it = source;
    write_feeds(root_ / "feeds.json", feeds);
}

void SessionStore::update_feed_state(const FeedSource& source) {
    std::lock_guard guard(feeds_mutex_);
    auto feeds = read_feeds(root_ / "feeds.json");
    auto it = std::find_if(feeds.begin(), feeds.end(), [&](const FeedSource& f) { return f.feed_id == source.feed_id; });
    if (it == feeds.end()) return;
    *it = source;
    write_feeds(root_ / "feeds.json", feeds);
}

void SessionStore::remove_feed(const std::string& feed_id) {
    std::lock_guard guard(feeds_mutex_);
    auto feeds = read_feeds(root_ / "feeds.json");
    std::erase_if(feeds, [&](const FeedSource& f) { return f.feed_id == feed_id; });
    write_feeds(root_ / "feeds.json", feeds);
}

std::vector<std::string> SessionStore::subscriptions(const std::string& user_id) const {
    const fs::path path = user_dir(user_id) / "subscriptions.json";
    const auto content = read_file(path);
    if (!content) return {};
    const json j = parse_document(*content, path);
    try {
        return j.at("feeds").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw StorageError("corrupt subscriptions in " + path.string() + ": " + e.what());
    }
}

void SessionStore::subscribe(const std::string& user_id, const std::string& feed_id) {
    require_feed(feed_id);
    std::lock_guard guard(journal_mutex(user_id));
    auto feeds = subscriptions(user_id);
    if (std::find(feeds.begin(), feeds.end(), feed_id) != feeds.end()) return;
    feeds.push_back(feed_id);
    write_file_atomic(user_dir(user_id) / "subscriptions.json",
                      json{{"schema_version", kSchemaVersion}, {"feeds", feeds}}.dump());
}

bool SessionStore::unsubscribe(const std::string& user_id, const std::string& feed_id) {
    std::lock_guard guard(journal_mutex(user_id));
    auto feeds = subscriptions(user_id);
    const auto removed = std::erase(feeds, feed_id);
    if (removed == 0) return false;
    write_file_atomic(user_dir(user_id) / "subscriptions.json",
                      json{{"schema_version", kSchemaVersion}, {"feeds", feeds}}.dump());
    return true;
}

namespace {

struct ItemFile {
    std::vector<NewsItem> items;
    std::size_t committed_bytes = 0;
    std::size_t file_bytes = 0;
};

ItemFile read_items(const fs::path& path) {
    ItemFile out;
    const auto content = read_file(path);
    if (!content) return out;
    const auto lines = committed_lines(*content);
    out.committed_bytes = lines.committed_bytes;
    out.file_bytes = lines.file_bytes;
    for (const auto line : lines.lines) {
        const json j = parse_line(line, path);
        try {
            out.items.push_back(news_item_from_json(j.at("item")));
        } catch (const Error& e) {
            throw StorageError("corrupt item in " + path.string() + ": " + e.what());
        } catch (const json::exception& e) {
            throw StorageError("corrupt item in " + path.string() + ": " + e.what());
        }
    }
    return out;
}

}  // namespace

std::size_t SessionStore::store_items(const std::string& feed_id, std::span<const NewsItem> items) {
    require_feed(feed_id);
    std::lock_guard guard(items_mutex_);
    const fs::path path = root_ / "feeds" / (feed_id + ".jsonl");
    const ItemFile existing = read_items(path);
    std::set<std::string> known;
    for (const auto& item : existing.items) known.insert(item.hyperlink);

    std::string batch;
    std::size_t added = 0;
    for (const auto& item : items) {
        if (!known.insert(item.hyperlink).second) continue;
        batch += json{{"schema_version", kSchemaVersion}, {"item", to_json(item)}}.dump();
        batch += '\n';
        ++added;
    }
    if (added == 0) return 0;
    batch.pop_back();  // append_line adds the final newline
    append_line(path, existing.committed_bytes, existing.file_bytes, batch);
    return added;
}

std::vector<NewsItem> SessionStore::load_items(const std::string& feed_id, std::optional<Timestamp> since) const {
    require_feed(feed_id);
    auto items = read_items(root_ / "feeds" / (feed_id + ".jsonl")).items;
    if (since) std::erase_if(items, [&](const NewsItem& i) { return i.fetched_at < *since; });
    return items;
}

}  // namespace feedrank
