#include <gtest/gtest.h>

#include <atomic>

#include "feedrank/errors.hpp"
#include "feedrank/feed.hpp"
#include "local_server.hpp"

using namespace feedrank;
using namespace std::chrono_literals;

namespace {

const Timestamp kNow = from_unix_seconds(1'300'000'000);
const char* kBody = "<rss version=\"2.0\"><channel><title>t</title></channel></rss>";

FeedSource source_for(const std::string& url) {
    FeedSource s;
    s.url = url;
    s.feed_id = feed_id_for_url(url);
    return s;
}

class FetchTest : public ::testing::Test {
protected:
    void SetUp() override {
        auto& srv = local.server();
        srv.Get("/feed", [this](const httplib::Request& req, httplib::Response& res) {
            last_if_none_match = req.get_header_value("If-None-Match");
            last_if_modified_since = req.get_header_value("If-Modified-Since");
            last_user_agent = req.get_header_value("User-Agent");
            if (last_if_none_match == "\"v1\"") {
                res.status = 304;
                return;
            }
            res.set_header("ETag", "\"v1\"");
            res.set_header("Last-Modified", "Thu, 01 Mar 2007 12:00:00 GMT");
            res.set_content(kBody, "application/rss+xml");
        });
        srv.Get(R"(/hop/(\d+))", [this](const httplib::Request& req, httplib::Response& res) {
            const int n = std::stoi(req.matches[1]);
            if (n == 0) res.set_content(kBody, "application/rss+xml");
            else res.set_redirect(local.url("/hop/" + std::to_string(n - 1)));
        });
        srv.Get("/gone", [](const httplib::Request&, httplib::Response& res) { res.status = 410; });
        srv.Get("/slow", [](const httplib::Request&, httplib::Response& res) {
            std::this_thread::sleep_for(1500ms);
            res.set_content(kBody, "text/xml");
        });
        local.start();
    }

    LocalServer local;
    std::string last_if_none_match, last_if_modified_since, last_user_agent;
};

}  // namespace

TEST_F(FetchTest, OkStoresValidatorsThenNotModified) {
    const FetchResult first = fetch_feed(source_for(local.url("/feed")), {}, kNow);
    EXPECT_EQ(first.body, kBody);
    EXPECT_FALSE(first.not_modified);
    EXPECT_EQ(first.source.etag, "\"v1\"");
    EXPECT_EQ(first.source.last_modified, "Thu, 01 Mar 2007 12:00:00 GMT");
    EXPECT_EQ(first.source.last_fetch, kNow);
    EXPECT_TRUE(last_if_none_match.empty());
    EXPECT_EQ(last_user_agent, FetchOptions{}.user_agent);

    const Timestamp later = kNow + 60s;
    const FetchResult second = fetch_feed(first.source, {}, later);
    EXPECT_TRUE(second.not_modified);
    EXPECT_TRUE(second.body.empty());
    EXPECT_EQ(second.source.last_fetch, later);
    EXPECT_EQ(last_if_none_match, "\"v1\"");
    EXPECT_EQ(last_if_modified_since, "Thu, 01 Mar 2007 12:00:00 GMT");
}

TEST_F(FetchTest, FollowsFiveRedirects) {
    const FetchResult r = fetch_feed(source_for(local.url("/hop/5")), {}, kNow);
    EXPECT_EQ(r.body, kBody);
    EXPECT_EQ(r.final_url, local.url("/hop/0"));
}

TEST_F(FetchTest, SixRedirectsIsNetworkError) {
    try {
        fetch_feed(source_for(local.url("/hop/6")), {}, kNow);
        FAIL() << "expected NetworkError";
    } catch (const NetworkError& e) {
        EXPECT_NE(std::string(e.what()).find("too many redirects"), std::string::npos);
    }
}

TEST_F(FetchTest, StatusOtherThanOkIsHttpError) {
    try {
        fetch_feed(source_for(local.url("/gone")), {}, kNow);
        FAIL() << "expected HttpError";
    } catch (const HttpError& e) {
        EXPECT_EQ(e.status(), 410);
    }
}

TEST_F(FetchTest, TimeoutIsNetworkError) {
    FetchOptions options;
    options.timeout = 300ms;
    EXPECT_THROW(fetch_feed(source_for(local.url("/slow")), options, kNow), NetworkError);
}

TEST(Fetch, ConnectionRefusedIsNetworkError) {
    LocalServer closed;
    closed.start();
    const std::string url = closed.url("/feed");
    closed.stop();
    EXPECT_THROW(fetch_feed(source_for(url), {}, kNow), NetworkError);
}

TEST(Fetch, BackoffDoublesAndCapsAtPollInterval) {
    FeedSource s = source_for("http://127.0.0.1:9/feed");
    const std::vector<std::chrono::seconds> expected{30s, 60s, 120s, 240s, 300s, 300s};
    for (const auto& delay : expected) {
        s = mark_fetch_failed(s, kNow, 300s);
        EXPECT_EQ(*s.retry_after, kNow + delay);
        EXPECT_FALSE(fetch_due(s, kNow + delay - 1s));
        EXPECT_TRUE(fetch_due(s, kNow + delay));
    }
    EXPECT_EQ(s.consecutive_failures, 6);
}

TEST_F(FetchTest, SuccessClearsBackoff) {
    FeedSource s = mark_fetch_failed(source_for(local.url("/feed")), kNow, 300s);
    const FetchResult r = fetch_feed(s, {}, kNow + 31s);
    EXPECT_EQ(r.source.consecutive_failures, 0);
    EXPECT_FALSE(r.source.retry_after);
}
