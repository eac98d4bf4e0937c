#include "feedrank/session.hpp"

#include <algorithm>

#include "feedrank/metrics.hpp"

namespace feedrank {

bool OpenSession::offers(const std::string& hyperlink) const {
    return std::any_of(offered.begin(), offered.end(),
                       [&](const ScoredItem& s) { return s.item.hyperlink == hyperlink; });
}

SessionSelections SessionRecord::selections() const {
    std::vector<NewsItem> items;
    for (const auto& s : offered) {
        if (chosen.contains(s.item.hyperlink)) items.push_back(s.item);
    }
    return SessionSelections(std::move(items));
}

SessionRecord SessionRecord::close(const OpenSession& open, Timestamp ended_at) {
    SessionRecord r;
    r.session_id = open.session_id;
    r.user_id = open.user_id;
    r.mode = open.mode;
    r.offered = open.offered;
    r.cosine_scores = open.cosine_scores;
    r.chosen = open.clicks;
    r.started_at = open.started_at;
    r.ended_at = ended_at;
    r.profile_version_before = open.profile_version_before;
    return r;
}

SessionMetrics session_metrics(const SessionRecord& record, std::size_t index) {
    std::vector<OfferedEntry> offered;
    offered.reserve(record.offered.size());
    for (std::size_t i = 0; i < record.offered.size(); ++i) {
        offered.push_back({record.offered[i].item.hyperlink, record.cosine_scores.at(i)});
    }
    SessionMetrics m;
    m.session_index = index;
    m.mode = record.mode.kind();
    m.n_chosen = record.chosen.size();
    const auto cd = c_d_components(offered, record.chosen);
    m.mean_chosen_score = cd.mean_chosen_score;
    m.max_mean_score = cd.max_mean_score;
    m.c_d = cd.rate;
    if (!record.chosen.empty()) m.r_precision = r_precision(offered, record.chosen);
    return m;
}

}  // namespace feedrank
