#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "feedrank/news_item.hpp"
#include "feedrank/profile.hpp"
#include "feedrank/ranker.hpp"
#include "feedrank/simulation.hpp"

namespace feedrank {

/// A page being read. Persisted so a restart keeps the clicks.
struct OpenSession {
    std::uint64_t session_id = 0;
    std::string user_id;
    RankingMode mode = RankingMode::cosine();
    std::vector<ScoredItem> offered;
    std::vector<double> cosine_scores;  // parallel to offered; the metric yardstick
    std::set<std::string> clicks;
    Timestamp started_at{};
    std::uint64_t profile_version_before = 0;

    bool offers(const std::string& hyperlink) const;
};

/// One finished session as written to the journal.
struct SessionRecord {
    std::uint64_t session_id = 0;
    std::string user_id;
    RankingMode mode = RankingMode::cosine();
    std::vector<ScoredItem> offered;
    std::vector<double> cosine_scores;
    std::set<std::string> chosen;
    Timestamp started_at{};
    std::optional<Timestamp> ended_at;
    std::uint64_t profile_version_before = 0;
    std::optional<std::uint64_t> profile_version_after;

    /// Chosen items in offered order.
    SessionSelections selections() const;

    static SessionRecord close(const OpenSession& open, Timestamp ended_at);
};

/// C_D and R-Precision of a recorded session, measured on the cosine scores.
SessionMetrics session_metrics(const SessionRecord& record, std::size_t index);

struct ProfileSnapshot {
    std::string user_id;
    std::uint64_t version = 0;
    UserProfile profile;
};

}  // namespace feedrank
