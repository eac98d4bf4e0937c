#include "feedrank/ranker.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_set>

#include "feedrank/errors.hpp"
#include "feedrank/random.hpp"

namespace feedrank {

RankingMode RankingMode::parse(std::string_view name, std::optional<std::uint64_t> seed) {
    if (name == "cosine") {
        if (seed) throw InvalidInput("seed is only valid for random mode");
        return cosine();
    }
    if (name == "binary") {
        if (seed) throw InvalidInput("seed is only valid for random mode");
        return binary();
    }
    if (name == "random") {
        if (!seed) throw InvalidInput("random mode requires a seed");
        return random(*seed);
    }
    throw InvalidInput("unknown ranking mode '" + std::string(name) + "'");
}

std::string_view kind_name(RankingKind kind) noexcept {
    switch (kind) {
        case RankingKind::Cosine: return "cosine";
        case RankingKind::Binary: return "binary";
        case RankingKind::Random: return "random";
    }
    return "cosine";
}

std::string_view RankingMode::name() const noexcept { return kind_name(kind_); }

namespace {

double sparse_dot(const TermVector& profile, const TermVector& headline) {
    // Headlines are short; probe the larger profile per headline term.
    double dot = 0.0;
    for (const auto& [term, w] : headline) dot += w * profile.weight(term);
    return dot;
}

double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

double cosine_score(const TermVector& profile, const TermVector& headline) {
    return CosineScorer(profile)(headline);
}

double binary_score(const TermVector& profile, const TermVector& headline) {
    for (const auto& [term, w] : headline) {
        if (profile.contains(term)) return 1.0;
    }
    return 0.0;
}

CosineScorer::CosineScorer(const TermVector& profile)
    : profile_(&profile), profile_norm_(profile.norm()) {}

double CosineScorer::operator()(const TermVector& headline) const {
    if (profile_norm_ == 0.0 || headline.empty()) return 0.0;
    const double headline_norm = headline.norm();
    if (headline_norm == 0.0) return 0.0;
    return clamp_unit(sparse_dot(*profile_, headline) / (profile_norm_ * headline_norm));
}

std::vector<RankedIndex> rank_indices(const TermVector& profile,
                                      std::span<const NewsItem> candidates,
                                      std::span<const TermVector> headline_vectors,
                                      const RankingMode& mode, std::size_t page_size) {
    if (candidates.size() != headline_vectors.size()) {
        throw InvalidInput("candidate and vector counts differ");
    }
    std::vector<RankedIndex> ranked(candidates.size());
    for (std::size_t i = 0; i < candidates.size(); ++i) ranked[i] = {i, 0.0};

    if (mode.kind() == RankingKind::Random) {
        Rng rng(*mode.seed());
        shuffle(std::span<RankedIndex>(ranked), rng);
    } else {
        if (mode.kind() == RankingKind::Cosine) {
            CosineScorer scorer(profile);
            for (auto& r : ranked) r.score = scorer(headline_vectors[r.index]);
        } else {
            for (auto& r : ranked) r.score = binary_score(profile, headline_vectors[r.index]);
        }
        std::sort(ranked.begin(), ranked.end(), [&](const RankedIndex& l, const RankedIndex& r) {
            if (l.score != r.score) return l.score > r.score;
            const auto& li = candidates[l.index];
            const auto& ri = candidates[r.index];
            if (li.fetched_at != ri.fetched_at) return li.fetched_at > ri.fetched_at;
            return li.hyperlink < ri.hyperlink;
        });
    }
    if (ranked.size() > page_size) ranked.resize(page_size);
    return ranked;
}

std::vector<ScoredItem> rank(const TermVector& profile, std::span<const NewsItem> candidates,
                             const RankingMode& mode, std::size_t page_size,
                             const Tokenizer& tokenizer) {
    if (page_size == 0) throw InvalidInput("page size must be positive");
    std::unordered_set<std::string_view> seen;
    for (const auto& item : candidates) {
        if (!seen.insert(item.hyperlink).second) {
            throw InvalidInput("duplicate candidate hyperlink " + item.hyperlink);
        }
    }
    std::vector<TermVector> vectors;
    vectors.reserve(candidates.size());
    for (const auto& item : candidates) vectors.push_back(tf_vector(tokenizer(item.headline)));

    auto ranked = rank_indices(profile, candidates, vectors, mode, page_size);
    std::vector<ScoredItem> out;
    out.reserve(ranked.size());
    for (std::size_t pos = 0; pos < ranked.size(); ++pos) {
        out.push_back({candidates[ranked[pos].index], ranked[pos].score, pos + 1});
    }
    return out;
}

}  // namespace feedrank
