#pragma once

#include <nlohmann/json.hpp>

#include "feedrank/news_item.hpp"
#include "feedrank/profile.hpp"
#include "feedrank/ranker.hpp"
#include "feedrank/session.hpp"
#include "feedrank/simulation.hpp"
#include "feedrank/text_model.hpp"

namespace feedrank {

// Wire and disk encodings. Timestamps are integer Unix seconds; doubles use
// the shortest representation that parses back to the same value.

/// Object of term -> weight, each weight a shortest round-trip decimal string.
nlohmann::json to_json(const TermVector& v);
TermVector term_vector_from_json(const nlohmann::json& j);

nlohmann::json to_json(const NewsItem& item);
NewsItem news_item_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FeedSource& source);
FeedSource feed_source_from_json(const nlohmann::json& j);

nlohmann::json to_json(const RankingMode& mode);
RankingMode ranking_mode_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScoredItem& item);
ScoredItem scored_item_from_json(const nlohmann::json& j);

nlohmann::json to_json(const UserProfile& profile);
UserProfile user_profile_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OpenSession& session);
OpenSession open_session_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SessionRecord& record);
SessionRecord session_record_from_json(const nlohmann::json& j);

nlohmann::json to_json(const SessionMetrics& metrics);

}  // namespace feedrank
