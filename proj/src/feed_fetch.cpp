#include "feedrank/feed.hpp"

#include <algorithm>
#include <memory>
#include <mutex>

#include <curl/curl.h>

#include "feedrank/errors.hpp"

namespace feedrank {
namespace {

void ensure_curl_initialized() {
    static std::once_flag once;
    std::call_once(once, [] { curl_global_init(CURL_GLOBAL_DEFAULT); });
}

struct Response {
    std::string body;
    std::optional<std::string> etag;
    std::optional<std::string> last_modified;
};

std::size_t on_body(char* data, std::size_t size, std::size_t n, void* user) {
    static_cast<Response*>(user)->body.append(data, size * n);
    return size * n;
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::size_t on_header(char* data, std::size_t size, std::size_t n, void* user) {
    auto* response = static_cast<Response*>(user);
    const std::string_view line(data, size * n);
    // A new status line starts each hop of a redirect chain.
    if (line.starts_with("HTTP/")) {
        response->etag.reset();
        response->last_modified.reset();
        return size * n;
    }
    const auto colon = line.find(':');
    if (colon == std::string_view::npos) return size * n;
    std::string name(line.substr(0, colon));
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
    std::string value = trim(line.substr(colon + 1));
    if (value.empty()) return size * n;
    if (name == "etag") response->etag = std::move(value);
    else if (name == "last-modified") response->last_modified = std::move(value);
    return size * n;
}

}  // namespace

FetchResult fetch_feed(const FeedSource& source, const FetchOptions& options, Timestamp now) {
    ensure_curl_initialized();
    std::unique_ptr<CURL, decltype(&curl_easy_cleanup)> curl(curl_easy_init(), curl_easy_cleanup);
    if (!curl) throw NetworkError("cannot initialize HTTP client");

    Response response;
    curl_slist* raw_headers = nullptr;
    if (source.etag) raw_headers = curl_slist_append(raw_headers, ("If-None-Match: " + *source.etag).c_str());
    if (source.last_modified) {
        raw_headers = curl_slist_append(raw_headers, ("If-Modified-Since: " + *source.last_modified).c_str());
    }
    std::unique_ptr<curl_slist, decltype(&curl_slist_free_all)> headers(raw_headers, curl_slist_free_all);

    CURL* h = curl.get();
    curl_easy_setopt(h, CURLOPT_URL, source.url.c_str());
    curl_easy_setopt(h, CURLOPT_PROTOCOLS, CURLPROTO_HTTP | CURLPROTO_HTTPS);
    curl_easy_setopt(h, CURLOPT_REDIR_PROTOCOLS, CURLPROTO_HTTP | CURLPROTO_HTTPS);
    curl_easy_setopt(h, CURLOPT_FOLLOWLOCATION, 1L);
    curl_easy_setopt(h, CURLOPT_MAXREDIRS, options.max_redirects);
    curl_easy_setopt(h, CURLOPT_TIMEOUT_MS, static_cast<long>(options.timeout.count()));
    curl_easy_setopt(h, CURLOPT_CONNECTTIMEOUT_MS, static_cast<long>(options.timeout.count()));
    curl_easy_setopt(h, CURLOPT_NOSIGNAL, 1L);
    curl_easy_setopt(h, CURLOPT_USERAGENT, options.user_agent.c_str());
    curl_easy_setopt(h, CURLOPT_ACCEPT_ENCODING, "");
    curl_easy_setopt(h, CURLOPT_HTTPHEADER, headers.get());
    curl_easy_setopt(h, CURLOPT_WRITEFUNCTION, on_body);
    curl_easy_setopt(h, CURLOPT_WRITEDATA, &response);
    curl_easy_setopt(h, CURLOPT_HEADERFUNCTION, on_header);
    curl_easy_setopt(h, CURLOPT_HEADERDATA, &response);

    const CURLcode rc = curl_easy_perform(h);
    if (rc == CURLE_TOO_MANY_REDIRECTS) throw NetworkError("too many redirects fetching " + source.url);
    if (rc != CURLE_OK) throw NetworkError(std::string(curl_easy_strerror(rc)) + " fetching " + source.url);

    long status = 0;
    curl_easy_getinfo(h, CURLINFO_RESPONSE_CODE, &status);
    char* effective = nullptr;
    curl_easy_getinfo(h, CURLINFO_EFFECTIVE_URL, &effective);

    FetchResult result;
    result.final_url = effective ? effective : source.url;
    result.source = source;
    result.source.last_fetch = now;
    result.source.consecutive_failures = 0;
    result.source.retry_after.reset();
    if (status == 304) {
        result.not_modified = true;
        return result;
    }
    if (status != 200) throw HttpError(static_cast<int>(status));
    result.body = std::move(response.body);
    result.source.etag = response.etag;
    result.source.last_modified = response.last_modified;
    return result;
}

FeedSource mark_fetch_failed(FeedSource source, Timestamp now, std::chrono::seconds poll_interval,
                             std::chrono::seconds base) {
    source.consecutive_failures += 1;
    std::chrono::seconds delay = base;
    for (int i = 1; i < source.consecutive_failures && delay < poll_interval; ++i) delay *= 2;
    source.retry_after = now + std::min(delay, poll_interval);
    return source;
}

bool fetch_due(const FeedSource& source, Timestamp now) {
    return !source.retry_after || *source.retry_after <= now;
}

}  // namespace feedrank
