#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "feedrank/news_item.hpp"

namespace feedrank {

/// Channel-level metadata plus entries, in document order.
struct ParsedFeed {
    std::optional<std::string> title;
    std::optional<std::string> link;
    std::vector<NewsItem> items;
};

/// Parses an RSS 2.0 or Atom 1.0 document. Relative links resolve against
/// the channel link (or xml:base), else against `fetch_url`. Entries without
/// a title or a resolvable link are skipped; later duplicates of a hyperlink
/// are dropped. Throws ParseError or UnknownFormat.
ParsedFeed parse_feed_document(std::string_view document, const std::string& feed_id,
                               Timestamp fetched_at, std::string_view fetch_url = {});

std::vector<NewsItem> parse_feed(std::string_view document, const std::string& feed_id,
                                 Timestamp fetched_at, std::string_view fetch_url = {});

/// One source per outline carrying xmlUrl, nested folders flattened. Throws ParseError.
std::vector<FeedSource> import_opml(std::string_view document);

/// Markup-free rendering of an HTML fragment: tags dropped, entities decoded,
/// whitespace collapsed.
std::string strip_markup(std::string_view html);

/// Resolves `reference` against `base`; nullopt when the result is not an absolute URL.
std::optional<std::string> resolve_url(std::string_view base, std::string_view reference);

/// Stable identifier derived from a feed URL.
std::string feed_id_for_url(std::string_view url);

struct FetchOptions {
    std::chrono::milliseconds timeout{15000};
    long max_redirects = 5;
    std::string user_agent = "feedrank/0.1 (personal feed ranker)";
};

struct FetchResult {
    std::string body;      // empty when not_modified
    bool not_modified = false;
    std::string final_url;  // after redirects
    FeedSource source;      // validators and last_fetch updated, backoff cleared
};

/// Conditional GET. Throws NetworkError (timeout, DNS, connect, redirect cap)
/// or HttpError for any status other than 200 and 304.
FetchResult fetch_feed(const FeedSource& source, const FetchOptions& options, Timestamp now);

/// Backoff after a failed fetch: 2^(n-1) * base, capped at `poll_interval`.
FeedSource mark_fetch_failed(FeedSource source, Timestamp now, std::chrono::seconds poll_interval,
                             std::chrono::seconds base = std::chrono::seconds(30));

bool fetch_due(const FeedSource& source, Timestamp now);

}  // namespace feedrank
