#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "feedrank/news_item.hpp"
#include "feedrank/text_model.hpp"

namespace feedrank {

enum class RankingKind { Cosine, Binary, Random };

std::string_view kind_name(RankingKind kind) noexcept;

/// How a page of headlines is ordered. Only Random carries a seed.
class RankingMode {
public:
    static RankingMode cosine() { return RankingMode(RankingKind::Cosine, std::nullopt); }
    static RankingMode binary() { return RankingMode(RankingKind::Binary, std::nullopt); }
    static RankingMode random(std::uint64_t seed) { return RankingMode(RankingKind::Random, seed); }

    /// "cosine", "binary" or "random"; `seed` is required for (and only for) random.
    static RankingMode parse(std::string_view name, std::optional<std::uint64_t> seed = std::nullopt);

    RankingKind kind() const noexcept { return kind_; }
    std::optional<std::uint64_t> seed() const noexcept { return seed_; }
    std::string_view name() const noexcept;

    friend bool operator==(const RankingMode&, const RankingMode&) = default;

private:
    RankingMode(RankingKind kind, std::optional<std::uint64_t> seed) : kind_(kind), seed_(seed) {}

    RankingKind kind_;
    std::optional<std::uint64_t> seed_;
};

struct ScoredItem {
    NewsItem item;
    double score = 0.0;
    std::size_t rank = 0;  // 1-based
};

/// Cosine of the angle between two non-negative vectors; 0 when either has zero norm.
double cosine_score(const TermVector& profile, const TermVector& headline);

/// 1 if any headline term is in the profile, else 0.
double binary_score(const TermVector& profile, const TermVector& headline);

/// Cosine against a fixed profile with its norm computed once.
class CosineScorer {
public:
    explicit CosineScorer(const TermVector& profile);
    double operator()(const TermVector& headline) const;

private:
    const TermVector* profile_;
    double profile_norm_;
};

struct RankedIndex {
    std::size_t index;  // into the candidate list
    double score;
};

/// Core ordering over candidates with precomputed headline vectors.
/// Sorted by score desc, then newest fetched_at, then hyperlink ascending.
/// Random mode shuffles with its seed and scores everything 0.
std::vector<RankedIndex> rank_indices(const TermVector& profile,
                                      std::span<const NewsItem> candidates,
                                      std::span<const TermVector> headline_vectors,
                                      const RankingMode& mode, std::size_t page_size);

/// Ranks candidates and keeps the first `page_size`. Throws InvalidInput when
/// two candidates share a hyperlink.
std::vector<ScoredItem> rank(const TermVector& profile, std::span<const NewsItem> candidates,
                             const RankingMode& mode, std::size_t page_size,
                             const Tokenizer& tokenizer = Tokenizer());

}  // namespace feedrank
