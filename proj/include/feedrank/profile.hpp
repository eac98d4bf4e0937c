#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "feedrank/news_item.hpp"
#include "feedrank/text_model.hpp"

namespace feedrank {

/// Mixing constants for folding a session into the stored profile.
/// `a` weighs the stored profile, `b` the session; a + b == 1 exactly.
class ProfileConfig {
public:
    ProfileConfig() = default;
    /// Throws ConfigError unless both lie in [0, 1] and sum to exactly 1.
    ProfileConfig(double a, double b);
    static ProfileConfig from_a(double a);

    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }

    friend bool operator==(const ProfileConfig&, const ProfileConfig&) = default;

private:
    double a_ = 0.5;
    double b_ = 0.5;
};

struct UserProfile {
    TermVector vector;
    std::uint64_t sessions_completed = 0;
    ProfileConfig config;

    friend bool operator==(const UserProfile&, const UserProfile&) = default;
};

/// Headlines the user picked during one session.
class SessionSelections {
public:
    SessionSelections() = default;
    /// Throws InvalidInput if two items share a hyperlink.
    explicit SessionSelections(std::vector<NewsItem> chosen);

    const std::vector<NewsItem>& chosen() const noexcept { return chosen_; }
    /// Chosen items that carry a non-empty summary, in choice order.
    std::vector<const NewsItem*> chosen_with_summary() const;
    bool empty() const noexcept { return chosen_.empty(); }

private:
    std::vector<NewsItem> chosen_;
};

/// Mean headline tf vector over the chosen items. Throws EmptySession.
TermVector session_profile(const SessionSelections& selections,
                           const Tokenizer& tokenizer = Tokenizer());

/// Mean summary tf vector over chosen items with a summary; empty when none.
TermVector summary_profile(const SessionSelections& selections,
                           const Tokenizer& tokenizer = Tokenizer());

/// End-of-session fold. Terms already in the profile get a*P + b*Ps + Pr,
/// new terms get Ps + Pr. Throws EmptySession if `session` is empty.
UserProfile update_profile(const UserProfile& profile, const TermVector& session,
                           const TermVector& summaries);

/// Folds update_profile over a session history, skipping empty sessions.
UserProfile replay_profile(std::span<const SessionSelections> sessions, ProfileConfig config,
                           const Tokenizer& tokenizer = Tokenizer());

}  // namespace feedrank
