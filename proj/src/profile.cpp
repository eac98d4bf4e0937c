#include "feedrank/profile.hpp"

#include <cmath>
#include <unordered_set>

#include "feedrank/errors.hpp"

namespace feedrank {

ProfileConfig::ProfileConfig(double a, double b) : a_(a), b_(b) {
    if (!(a >= 0.0 && a <= 1.0) || !(b >= 0.0 && b <= 1.0)) {
        throw ConfigError("profile constants must lie in [0, 1]");
    }
    if (a + b != 1.0) throw ConfigError("profile constants must satisfy a + b = 1");
}

ProfileConfig ProfileConfig::from_a(double a) { return ProfileConfig(a, 1.0 - a); }

SessionSelections::SessionSelections(std::vector<NewsItem> chosen) : chosen_(std::move(chosen)) {
    std::unordered_set<std::string> seen;
    for (const auto& item : chosen_) {
        if (!seen.insert(item.hyperlink).second) {
            throw InvalidInput("duplicate chosen hyperlink " + item.hyperlink);
        }
    }
}

std::vector<const NewsItem*> SessionSelections::chosen_with_summary() const {
    std::vector<const NewsItem*> out;
    for (const auto& item : chosen_) {
        if (item.summary && !item.summary->empty()) out.push_back(&item);
    }
    return out;
}

TermVector session_profile(const SessionSelections& selections, const Tokenizer& tokenizer) {
    if (selections.empty()) throw EmptySession();
    std::vector<TermVector> vectors;
    vectors.reserve(selections.chosen().size());
    for (const auto& item : selections.chosen()) vectors.push_back(tf_vector(tokenizer(item.headline)));
    return vector_sum_scaled(vectors, 1.0 / static_cast<double>(vectors.size()));
}

TermVector summary_profile(const SessionSelections& selections, const Tokenizer& tokenizer) {
    auto with_summary = selections.chosen_with_summary();
    if (with_summary.empty()) return {};
    std::vector<TermVector> vectors;
    vectors.reserve(with_summary.size());
    for (const NewsItem* item : with_summary) vectors.push_back(tf_vector(tokenizer(*item->summary)));
    return vector_sum_scaled(vectors, 1.0 / static_cast<double>(vectors.size()));
}

UserProfile update_profile(const UserProfile& profile, const TermVector& session,
                           const TermVector& summaries) {
    if (session.empty()) throw EmptySession();
    const double a = profile.config.a();
    const double b = profile.config.b();

    auto p = profile.vector.begin(), p_end = profile.vector.end();
    auto s = session.begin(), s_end = session.end();
    auto r = summaries.begin(), r_end = summaries.end();

    std::vector<TermVector::Entry> out;
    out.reserve(profile.vector.size() + session.size() + summaries.size());
    while (p != p_end || s != s_end || r != r_end) {
        // Smallest term among the three heads.
        const std::string* term = nullptr;
        for (auto [it, end] : {std::pair{p, p_end}, std::pair{s, s_end}, std::pair{r, r_end}}) {
            if (it != end && (term == nullptr || it->first < *term)) term = &it->first;
        }
        double pw = 0.0, sw = 0.0, rw = 0.0;
        bool in_profile = false;
        std::string key = *term;
        if (p != p_end && p->first == key) { pw = p->second; in_profile = true; ++p; }
        if (s != s_end && s->first == key) { sw = s->second; ++s; }
        if (r != r_end && r->first == key) { rw = r->second; ++r; }

        double w = in_profile ? (a * pw + b * sw) + rw : sw + rw;
        if (!std::isfinite(w)) throw InvalidInput("profile weight overflow for term " + key);
        if (w > 0.0) out.emplace_back(std::move(key), w);
    }

    UserProfile next;
    next.vector = TermVector::from_entries(std::move(out));
    next.sessions_completed = profile.sessions_completed + 1;
    next.config = profile.config;
    return next;
}

UserProfile replay_profile(std::span<const SessionSelections> sessions, ProfileConfig config,
                           const Tokenizer& tokenizer) {
    UserProfile profile;
    profile.config = config;
    for (const auto& selections : sessions) {
        if (selections.empty()) continue;
        profile = update_profile(profile, session_profile(selections, tokenizer),
                                 summary_profile(selections, tokenizer));
    }
    return profile;
}

}  // namespace feedrank
