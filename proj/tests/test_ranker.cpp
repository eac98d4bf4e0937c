#include <gtest/gtest.h>

#include <algorithm>
#include <random>

#include "feedrank/errors.hpp"
#include "feedrank/ranker.hpp"
#include "oracles.hpp"

using namespace feedrank;

namespace {

NewsItem item(std::string headline, std::string link, std::int64_t fetched = 0) {
    NewsItem it;
    it.headline = std::move(headline);
    it.hyperlink = std::move(link);
    it.fetched_at = from_unix_seconds(fetched);
    return it;
}

std::vector<std::string> links(const std::vector<ScoredItem>& page) {
    std::vector<std::string> out;
    for (const auto& s : page) out.push_back(s.item.hyperlink);
    return out;
}

oracle::Dense dense(const TermVector& v) {
    oracle::Dense out;
    for (const auto& [t, w] : v) out[t] = w;
    return out;
}

TermVector random_vector(std::mt19937_64& rng, int vocab) {
    std::vector<TermVector::Entry> entries;
    for (int t = 0; t < vocab; ++t)
        if (rng() % 3 == 0) entries.emplace_back("t" + std::to_string(t), 1.0 + static_cast<double>(rng() % 100));
    return TermVector::from_entries(std::move(entries));
}

}  // namespace

TEST(CosineScore, HandExamples) {
    EXPECT_DOUBLE_EQ(cosine_score({{"a", 0.7}}, {{"a", 0.3}}), 1.0);
    EXPECT_EQ(cosine_score({{"a", 1}}, {{"b", 1}}), 0.0);
    EXPECT_NEAR(cosine_score({{"a", 1}, {"b", 1}}, {{"a", 1}}), 0.70711, 1e-5);
    EXPECT_EQ(cosine_score({}, {{"a", 1}}), 0.0);
}

TEST(CosineScore, MatchesDenseOracleAndProperties) {
    std::mt19937_64 rng(1);
    for (int trial = 0; trial < 500; ++trial) {
        const TermVector p = random_vector(rng, 10), w = random_vector(rng, 10);
        const double c = cosine_score(p, w);
        EXPECT_NEAR(c, oracle::cosine(dense(p), dense(w)), 1e-9);
        EXPECT_NEAR(c, cosine_score(w, p), 1e-9);
        EXPECT_GE(c, 0.0);
        EXPECT_LE(c, 1.0);
        if (!p.empty()) {
            EXPECT_NEAR(cosine_score(p, p), 1.0, 1e-9);
            EXPECT_NEAR(cosine_score(p.scaled(3.5), w), c, 1e-9);
            if (!w.empty()) {
                EXPECT_EQ(binary_score(p, w) == 1.0, c > 0.0);
            }
        }
        EXPECT_NEAR(CosineScorer(p)(w), c, 1e-12);
    }
}

TEST(BinaryScore, HandExamples) {
    EXPECT_EQ(binary_score({{"a", 0.01}}, {{"a", 1}, {"z", 1}}), 1.0);
    EXPECT_EQ(binary_score({{"a", 1}}, {{"b", 1}, {"c", 1}}), 0.0);
    EXPECT_EQ(binary_score({}, {{"a", 1}}), 0.0);
}

TEST(Rank, EmptyProfileUsesTieBreakOrder) {
    const std::vector<NewsItem> c{item("one", "https://x/b", 10), item("two", "https://x/a", 10),
                                  item("three", "https://x/c", 20)};
    const auto page = rank({}, c, RankingMode::cosine(), 14);
    EXPECT_EQ(links(page), (std::vector<std::string>{"https://x/c", "https://x/a", "https://x/b"}));
    for (const auto& s : page) EXPECT_EQ(s.score, 0.0);
    EXPECT_EQ(page[0].rank, 1u);
    EXPECT_EQ(page[2].rank, 3u);
}

TEST(Rank, DescendingScoresMatchBruteForceSort) {
    std::mt19937_64 rng(9);
    const std::vector<std::string> words{"mars", "probe", "launch", "vote", "budget", "match", "goal", "rain"};
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<NewsItem> c;
        for (int i = 0; i < 8; ++i) {
            std::string h = words[rng() % words.size()] + " " + words[rng() % words.size()] + " " +
                            words[rng() % words.size()];
            c.push_back(item(h, "https://x/" + std::to_string(i), static_cast<std::int64_t>(rng() % 3)));
        }
        const TermVector profile{{"mars", 0.5}, {"vote", 0.25}, {"goal", 0.125}};
        const auto page = rank(profile, c, RankingMode::cosine(), 5);
        ASSERT_EQ(page.size(), 5u);

        std::vector<std::tuple<double, std::int64_t, std::string>> expected;
        for (const auto& it : c)
            expected.emplace_back(-oracle::cosine(dense(profile), dense(tf_vector(tokenize(it.headline)))),
                                  -to_unix_seconds(it.fetched_at), it.hyperlink);
        std::sort(expected.begin(), expected.end());
        for (std::size_t i = 0; i < page.size(); ++i) {
            EXPECT_EQ(page[i].item.hyperlink, std::get<2>(expected[i]));
            EXPECT_NEAR(page[i].score, -std::get<0>(expected[i]), 1e-12);
        }
    }
}

TEST(Rank, ScalingProfileKeepsOrder) {
    const std::vector<NewsItem> c{item("solar flare storm", "1"), item("solar panel price", "2"),
                                  item("storm warning coast", "3"), item("price index falls", "4")};
    const TermVector p{{"solar", 0.6}, {"storm", 0.3}, {"price", 0.1}};
    EXPECT_EQ(links(rank(p, c, RankingMode::cosine(), 4)), links(rank(p.scaled(42.0), c, RankingMode::cosine(), 4)));
}

TEST(Rank, BinaryScoresAreZeroOrOne) {
    const std::vector<NewsItem> c{item("solar flare", "1"), item("bond yields", "2"), item("flare gun", "3")};
    const auto page = rank({{"flare", 0.2}}, c, RankingMode::binary(), 3);
    EXPECT_EQ(links(page), (std::vector<std::string>{"1", "3", "2"}));
    for (const auto& s : page) EXPECT_TRUE(s.score == 0.0 || s.score == 1.0);
}

TEST(Rank, RandomIsSeededAndScoresZero) {
    std::vector<NewsItem> c;
    for (int i = 0; i < 30; ++i) c.push_back(item("headline number " + std::to_string(i), std::to_string(i)));
    const auto a = rank({{"headline", 1}}, c, RankingMode::random(77), 14);
    const auto b = rank({{"headline", 1}}, c, RankingMode::random(77), 14);
    const auto other = rank({{"headline", 1}}, c, RankingMode::random(78), 14);
    EXPECT_EQ(links(a), links(b));
    EXPECT_NE(links(a), links(other));
    for (const auto& s : a) EXPECT_EQ(s.score, 0.0);
}

TEST(Rank, TruncatesToPageSize) {
    const std::vector<NewsItem> c{item("alpha one", "a1", 5), item("alpha two", "a2", 1), item("beta", "b")};
    const auto page = rank({{"alpha", 1}}, c, RankingMode::cosine(), 2);
    ASSERT_EQ(page.size(), 2u);
    EXPECT_EQ(page[0].item.headline, "alpha one");
}

TEST(Rank, DuplicateHyperlinksRejected) {
    const std::vector<NewsItem> c{item("alpha one", "same"), item("alpha two", "same")};
    EXPECT_THROW(rank({}, c, RankingMode::cosine(), 14), InvalidInput);
}

TEST(RankingModeType, ParseRequiresSeedOnlyForRandom) {
    EXPECT_EQ(RankingMode::parse("cosine"), RankingMode::cosine());
    EXPECT_EQ(RankingMode::parse("random", 3), RankingMode::random(3));
    EXPECT_THROW(RankingMode::parse("random"), InvalidInput);
    EXPECT_THROW(RankingMode::parse("binary", 3), InvalidInput);
    EXPECT_THROW(RankingMode::parse("bm25"), InvalidInput);
    EXPECT_EQ(RankingMode::random(1).name(), "random");
}
