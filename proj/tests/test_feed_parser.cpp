#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "feedrank/errors.hpp"
#include "feedrank/feed.hpp"

using namespace feedrank;

namespace {

std::string fixture(const std::string& name) {
    std::ifstream in(std::string(FEEDRANK_FIXTURES) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing fixture " + name);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

const Timestamp kNow = from_unix_seconds(1'200'000'000);

}  // namespace

TEST(ParseFeed, MinimalRss) {
    const auto items = parse_feed(fixture("rss_minimal.xml"), "f1", kNow);
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].headline, "Only headline here");
    EXPECT_EQ(items[0].hyperlink, "https://example.org/only");
    EXPECT_FALSE(items[0].summary);
    EXPECT_EQ(items[0].feed_id, "f1");
    EXPECT_EQ(items[0].fetched_at, kNow);
}

TEST(ParseFeed, RssSkipsUntitledAndDuplicatesResolvesRelative) {
    const ParsedFeed feed = parse_feed_document(fixture("rss_mixed.xml"), "f", kNow);
    EXPECT_EQ(feed.title, "Mixed bag");
    ASSERT_EQ(feed.items.size(), 2u);
    EXPECT_EQ(feed.items[0].headline, "Compiler release brings faster builds");
    EXPECT_EQ(feed.items[0].summary, "The new release ships today.");
    EXPECT_EQ(feed.items[1].hyperlink, "https://news.example.org/section/stories/relative.html");
}

TEST(ParseFeed, AtomThreeEntriesOneWithoutLink) {
    const auto items = parse_feed(fixture("atom_three.xml"), "f", kNow);
    ASSERT_EQ(items.size(), 2u);
    EXPECT_EQ(items[0].headline, "Parsers and the web");
    EXPECT_EQ(items[0].hyperlink, "https://blog.example.net/posts/parsers");
    EXPECT_EQ(items[0].summary, "Feeds everywhere");
    EXPECT_EQ(items[1].headline, "Vector space models");
    EXPECT_EQ(items[1].hyperlink, "https://blog.example.net/posts/vectors");
}

TEST(ParseFeed, HtmlIsUnknownFormat) {
    EXPECT_THROW(parse_feed(fixture("not_a_feed.html"), "f", kNow), UnknownFormat);
    EXPECT_THROW(parse_feed(fixture("html5_page.html"), "f", kNow), UnknownFormat);
    EXPECT_THROW(parse_feed(fixture("rss_rdf_like.xml"), "f", kNow), UnknownFormat);
}

TEST(ParseFeed, MalformedReportsPosition) {
    try {
        parse_feed("<rss><channel><item><title>x</item></channel></rss>", "f", kNow);
        FAIL() << "expected ParseError";
    } catch (const ParseError& e) {
        EXPECT_EQ(e.line(), 1);
        EXPECT_GT(e.column(), 0);
        EXPECT_FALSE(e.reason().empty());
    }
    EXPECT_THROW(parse_feed("", "f", kNow), ParseError);
}

TEST(ParseFeed, LegacyEncodingTranscoded) {
    const auto items = parse_feed(fixture("rss_windows1252.xml"), "f", kNow);
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].headline, "Caf\xC3\xA9 owners \xE2\x80\x9Cwelcome\xE2\x80\x9D new rules");
    EXPECT_EQ(items[0].summary, "Na\xC3\xAFve r\xC3\xA9sum\xC3\xA9 \xE2\x80\x93 yes");
}

TEST(ParseFeed, RelativeLinkFallsBackToFetchUrl) {
    const std::string doc =
        "<rss version=\"2.0\"><channel><title>t</title>"
        "<item><title>Rel</title><link>/a/b</link></item></channel></rss>";
    const auto items = parse_feed(doc, "f", kNow, "https://host.example/feed.xml");
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].hyperlink, "https://host.example/a/b");
    EXPECT_TRUE(parse_feed(doc, "f", kNow).empty());  // nothing to resolve against
}

TEST(ParseFeed, AtomFirstLinkWhenNoAlternate) {
    const std::string doc =
        "<feed xmlns=\"http://www.w3.org/2005/Atom\"><entry><title>E</title>"
        "<link rel=\"enclosure\" href=\"https://x.example/a.mp3\"/><link rel=\"related\" href=\"https://x.example/r\"/>"
        "</entry></feed>";
    const auto items = parse_feed(doc, "f", kNow);
    ASSERT_EQ(items.size(), 1u);
    EXPECT_EQ(items[0].hyperlink, "https://x.example/a.mp3");
}

TEST(ParseFeed, FeedWithoutAtomNamespaceIsUnknown) {
    EXPECT_THROW(parse_feed("<feed><entry/></feed>", "f", kNow), UnknownFormat);
}

TEST(ParseFeed, SurvivesMutatedFixtures) {
    const std::vector<std::string> seeds{fixture("rss_mixed.xml"), fixture("atom_three.xml"),
                                         fixture("rss_windows1252.xml")};
    std::mt19937_64 rng(2024);
    for (int round = 0; round < 3000; ++round) {
        std::string doc = seeds[rng() % seeds.size()];
        const int edits = 1 + static_cast<int>(rng() % 8);
        for (int e = 0; e < edits && !doc.empty(); ++e) {
            const std::size_t pos = rng() % doc.size();
            switch (rng() % 3) {
                case 0: doc[pos] = static_cast<char>(rng() & 0xFF); break;
                case 1: doc.erase(pos, 1 + rng() % 16); break;
                default: doc.insert(pos, doc.substr(rng() % doc.size(), rng() % 32)); break;
            }
        }
        try {
            parse_feed(doc, "f", kNow);
        } catch (const ParseError&) {
        } catch (const UnknownFormat&) {
        }
    }
}

TEST(ImportOpml, FlatList) {
    const auto sources = import_opml(fixture("subscriptions_flat.opml"));
    ASSERT_EQ(sources.size(), 2u);
    EXPECT_EQ(sources[0].url, "https://science.example.com/rss.xml");
    EXPECT_EQ(sources[0].title, "Science Daily");
    EXPECT_EQ(sources[1].title, "Tech");
    EXPECT_EQ(sources[0].feed_id, feed_id_for_url(sources[0].url));
}

TEST(ImportOpml, NestedFoldersFlattened) {
    const auto sources = import_opml(fixture("subscriptions_nested.opml"));
    ASSERT_EQ(sources.size(), 3u);
    EXPECT_EQ(sources[1].url, "https://city.example.com/rss");
}

TEST(ImportOpml, Errors) {
    EXPECT_THROW(import_opml(""), ParseError);
    EXPECT_THROW(import_opml(fixture("rss_minimal.xml")), ParseError);
}

TEST(StripMarkup, TagsEntitiesAndScripts) {
    EXPECT_EQ(strip_markup("<p>Fish &amp; chips</p><p>today&#33;</p>"), "Fish & chips today!");
    EXPECT_EQ(strip_markup("a<script>var x = '<b>';</script>b"), "ab");
    EXPECT_EQ(strip_markup("x <!-- hidden --> y&#x263A;"), "x y\xE2\x98\xBA");
    EXPECT_EQ(strip_markup("  3 < 4 and 5 > 2  "), "3 < 4 and 5 > 2");
}

TEST(ResolveUrl, Cases) {
    EXPECT_EQ(resolve_url("https://a.example/x/y", "../z"), "https://a.example/z");
    EXPECT_EQ(resolve_url("https://a.example/x/", "https://b.example/q"), "https://b.example/q");
    EXPECT_FALSE(resolve_url("", "relative/only"));
}
