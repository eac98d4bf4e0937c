#include "feedrank/service.hpp"

#include <algorithm>
#include <atomic>
#include <unordered_set>

#include <spdlog/spdlog.h>

#include "feedrank/errors.hpp"
#include "feedrank/random.hpp"

namespace feedrank {

Timestamp system_now() {
    return std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now());
}

namespace {

Tokenizer make_tokenizer(const ServiceConfig& config) {
    if (config.stopwords_path) return Tokenizer(load_stopwords(*config.stopwords_path));
    return Tokenizer();
}

std::uint64_t user_hash(std::string_view user_id) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : user_id) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t next_session_id(const std::vector<SessionRecord>& sessions) {
    return sessions.empty() ? 1 : sessions.back().session_id + 1;
}

}  // namespace

FeedService::FeedService(ServiceConfig config, Clock clock)
    : config_(std::move(config)),
      clock_(std::move(clock)),
      store_(config_.data_dir, config_.profile),
      tokenizer_(make_tokenizer(config_)) {
    config_.validate();
}

std::vector<NewsItem> FeedService::candidates(const std::string& user_id) const {
    const Timestamp now = clock_();
    const Timestamp horizon = now - std::chrono::duration_cast<std::chrono::seconds>(config_.item_horizon);

    const auto sessions = store_.list_sessions(user_id);
    std::unordered_set<std::string> clicked;
    for (const auto& s : sessions) clicked.insert(s.chosen.begin(), s.chosen.end());
    std::optional<Timestamp> last_end;
    if (!sessions.empty()) last_end = sessions.back().ended_at;

    std::vector<NewsItem> unread;
    std::unordered_set<std::string> seen;
    for (const auto& feed_id : store_.subscriptions(user_id)) {
        for (auto& item : store_.load_items(feed_id, horizon)) {
            if (clicked.contains(item.hyperlink) || !seen.insert(item.hyperlink).second) continue;
            unread.push_back(std::move(item));
        }
    }

    std::vector<NewsItem> fresh;
    std::vector<NewsItem> older;
    for (auto& item : unread) {
        (!last_end || item.fetched_at > *last_end ? fresh : older).push_back(std::move(item));
    }
    if (fresh.size() < config_.page_size) {
        std::stable_sort(older.begin(), older.end(),
                         [](const NewsItem& l, const NewsItem& r) { return l.fetched_at > r.fetched_at; });
        const std::size_t missing = std::min(config_.page_size - fresh.size(), older.size());
        fresh.insert(fresh.end(), std::make_move_iterator(older.begin()),
                     std::make_move_iterator(older.begin() + static_cast<std::ptrdiff_t>(missing)));
    }
    return fresh;
}

std::pair<std::vector<ScoredItem>, std::vector<double>> FeedService::preview(const std::string& user_id,
                                                                             const RankingMode& mode,
                                                                             std::size_t page_size) const {
    const UserProfile profile = store_.load_profile(user_id);
    const auto pool = candidates(user_id);
    auto page = rank(profile.vector, pool, mode, page_size, tokenizer_);
    const CosineScorer scorer(profile.vector);
    std::vector<double> cosine;
    cosine.reserve(page.size());
    for (const auto& s : page) cosine.push_back(scorer(tf_vector(tokenizer_(s.item.headline))));
    return {std::move(page), std::move(cosine)};
}

std::uint64_t session_seed(std::string_view user_id, std::uint64_t session_id) {
    return derive_seed(user_hash(user_id), session_id);
}

std::uint64_t FeedService::next_session_seed(const std::string& user_id) const {
    return session_seed(user_id, next_session_id(store_.list_sessions(user_id)));
}

OpenSession FeedService::start_session(const std::string& user_id, RankingKind kind,
                                       std::optional<std::uint64_t> seed) {
    auto lock = store_.lock_user(user_id);
    if (store_.load_open_session(user_id)) throw SessionOpen("user " + user_id + " already has an open session");
    const ProfileSnapshot snapshot = store_.load_snapshot(user_id);

    OpenSession open;
    open.session_id = next_session_id(store_.list_sessions(user_id));
    open.user_id = user_id;
    switch (kind) {
        case RankingKind::Cosine: open.mode = RankingMode::cosine(); break;
        case RankingKind::Binary: open.mode = RankingMode::binary(); break;
        case RankingKind::Random:
            open.mode = RankingMode::random(seed.value_or(session_seed(user_id, open.session_id)));
            break;
    }
    auto [page, cosine] = preview(user_id, open.mode, config_.page_size);
    open.offered = std::move(page);
    open.cosine_scores = std::move(cosine);
    open.started_at = clock_();
    open.profile_version_before = snapshot.version;
    store_.save_open_session(open);
    return open;
}

std::optional<OpenSession> FeedService::current_session(const std::string& user_id) const {
    return store_.load_open_session(user_id);
}

void FeedService::click(const std::string& user_id, const std::string& hyperlink) {
    auto lock = store_.lock_user(user_id);
    auto open = store_.load_open_session(user_id);
    if (!open) throw NotFound("user " + user_id + " has no open session");
    if (!open->offers(hyperlink)) throw InvalidInput("hyperlink was not offered in this session: " + hyperlink);
    if (!open->clicks.insert(hyperlink).second) return;
    store_.save_open_session(*open);
}

EndedSession FeedService::end_session(const std::string& user_id) {
    auto lock = store_.lock_user(user_id);
    const auto open = store_.load_open_session(user_id);
    if (!open) throw NotFound("user " + user_id + " has no open session");

    SessionRecord record = SessionRecord::close(*open, clock_());
    std::optional<UserProfile> updated;
    if (!record.chosen.empty()) {
        const UserProfile current = store_.load_profile(user_id);
        const SessionSelections selections = record.selections();
        updated = update_profile(current, session_profile(selections, tokenizer_),
                                 summary_profile(selections, tokenizer_));
    }
    EndedSession ended;
    ended.record = store_.append_session(std::move(record), updated);
    store_.clear_open_session(user_id);
    ended.metrics = session_metrics(ended.record, ended.record.session_id);
    ended.profile_version = *ended.record.profile_version_after;
    return ended;
}

std::vector<SessionMetrics> FeedService::metrics(const std::string& user_id) const {
    std::vector<SessionMetrics> out;
    for (const auto& record : store_.list_sessions(user_id)) out.push_back(session_metrics(record, record.session_id));
    return out;
}

std::vector<FeedSource> FeedService::user_feeds(const std::string& user_id) const {
    const auto subscribed = store_.subscriptions(user_id);
    std::vector<FeedSource> out;
    for (const auto& feed : store_.list_feeds()) {
        if (std::find(subscribed.begin(), subscribed.end(), feed.feed_id) != subscribed.end()) out.push_back(feed);
    }
    return out;
}

FeedSource FeedService::add_feed(const std::string& user_id, const std::string& url,
                                 std::optional<std::string> title) {
    auto normalized = resolve_url({}, url);
    if (!normalized || !(normalized->starts_with("http://") || normalized->starts_with("https://"))) {
        throw InvalidInput("feed url must be an absolute http(s) URL: " + url);
    }
    const std::string feed_id = feed_id_for_url(*normalized);
    auto source = store_.find_feed(feed_id);
    if (!source) {
        source.emplace();
        source->feed_id = feed_id;
        source->url = *normalized;
        source->title = std::move(title);
        store_.upsert_feed(*source);
    }
    store_.subscribe(user_id, feed_id);
    return *source;
}

bool FeedService::remove_feed(const std::string& user_id, const std::string& feed_id) {
    if (!store_.unsubscribe(user_id, feed_id)) return false;
    for (const auto& other : store_.list_users()) {
        const auto subs = store_.subscriptions(other);
        if (std::find(subs.begin(), subs.end(), feed_id) != subs.end()) return true;
    }
    store_.remove_feed(feed_id);
    return true;
}

std::vector<FeedSource> FeedService::import_opml(const std::string& user_id, std::string_view document) {
    auto sources = feedrank::import_opml(document);
    std::vector<FeedSource> out;
    for (auto& s : sources) {
        if (!(s.url.starts_with("http://") || s.url.starts_with("https://"))) continue;
        out.push_back(add_feed(user_id, s.url, s.title));
    }
    return out;
}

PollOutcome FeedService::poll_source(const FeedSource& source) {
    PollOutcome outcome;
    outcome.feed_id = source.feed_id;
    outcome.url = source.url;
    const Timestamp now = clock_();
    if (!fetch_due(source, now)) {
        outcome.skipped = true;
        return outcome;
    }
    FetchOptions options;
    options.timeout = config_.fetch_timeout;
    try {
        FetchResult result = fetch_feed(source, options, now);
        if (result.not_modified) {
            outcome.not_modified = true;
        } else {
            ParsedFeed parsed = parse_feed_document(result.body, source.feed_id, now, result.final_url);
            outcome.parsed = parsed.items.size();
            outcome.added = store_.store_items(source.feed_id, parsed.items);
            if (!result.source.title && parsed.title) result.source.title = parsed.title;
        }
        store_.update_feed_state(result.source);
    } catch (const Error& e) {
        outcome.error = e.what();
        store_.update_feed_state(mark_fetch_failed(source, now, config_.poll_interval));
    }
    return outcome;
}

std::vector<PollOutcome> FeedService::poll_once() {
    std::lock_guard guard(poll_mutex_);
    const auto feeds = store_.list_feeds();
    std::vector<PollOutcome> outcomes(feeds.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < feeds.size(); i = next++) outcomes[i] = poll_source(feeds[i]);
    };
    std::vector<std::thread> workers;
    const std::size_t n = std::min(config_.fetch_concurrency, feeds.size());
    for (std::size_t k = 1; k < n; ++k) workers.emplace_back(worker);
    worker();
    for (auto& t : workers) t.join();
    return outcomes;
}

FeedPoller::FeedPoller(FeedService& service) : service_(service) {}

FeedPoller::~FeedPoller() { stop(); }

void FeedPoller::start() {
    std::lock_guard guard(mutex_);
    if (thread_.joinable()) return;
    stopping_ = false;
    thread_ = std::thread([this] { run(); });
}

void FeedPoller::stop() {
    {
        std::lock_guard guard(mutex_);
        stopping_ = true;
    }
    cv_.notify_all();
    if (thread_.joinable()) thread_.join();
}

void FeedPoller::wake() {
    {
        std::lock_guard guard(mutex_);
        woken_ = true;
    }
    cv_.notify_all();
}

void FeedPoller::run() {
    for (;;) {
        try {
            for (const auto& outcome : service_.poll_once()) {
                if (outcome.error) {
                    spdlog::warn("poll feed_id={} url={} error=\"{}\"", outcome.feed_id, outcome.url, *outcome.error);
                } else if (!outcome.skipped) {
                    spdlog::info("poll feed_id={} parsed={} added={} not_modified={}", outcome.feed_id,
                                 outcome.parsed, outcome.added, outcome.not_modified);
                }
            }
        } catch (const std::exception& e) {
            spdlog::error("poll round failed: {}", e.what());
        }
        std::unique_lock lock(mutex_);
        cv_.wait_for(lock, service_.config().poll_interval, [this] { return stopping_ || woken_; });
        if (stopping_) return;
        woken_ = false;
    }
}

}  // namespace feedrank
