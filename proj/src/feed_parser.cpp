#include "feedrank/feed.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <memory>
#include <unordered_set>

#include <curl/curl.h>
#include <expat.h>
#include <unicode/ucnv.h>
#include <unicode/unistr.h>

#include "feedrank/errors.hpp"

namespace feedrank {
namespace {

constexpr char kNsSep = '|';
constexpr std::string_view kAtomNs = "http://www.w3.org/2005/Atom";
constexpr std::string_view kXmlBase = "http://www.w3.org/XML/1998/namespace|base";

bool is_space(unsigned char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending = false;
    for (unsigned char c : text) {
        if (is_space(c)) {
            pending = !out.empty();
            continue;
        }
        if (pending) out += ' ';
        pending = false;
        out += static_cast<char>(c);
    }
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
           });
}

void append_utf8(std::string& out, char32_t cp) {
    if (cp == 0 || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) cp = 0xFFFD;
    if (cp < 0x80) {
        out += static_cast<char>(cp);
    } else if (cp < 0x800) {
        out += static_cast<char>(0xC0 | (cp >> 6));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else if (cp < 0x10000) {
        out += static_cast<char>(0xE0 | (cp >> 12));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    } else {
        out += static_cast<char>(0xF0 | (cp >> 18));
        out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
        out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
        out += static_cast<char>(0x80 | (cp & 0x3F));
    }
}

// ---- encoding -------------------------------------------------------------

std::string utf8_from_unicode(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

/// C0 controls other than tab/LF/CR are not XML characters; blank them.
void blank_controls(std::string& text) {
    for (char& c : text) {
        const auto u = static_cast<unsigned char>(c);
        if (u < 0x20 && u != '\t' && u != '\n' && u != '\r') c = ' ';
    }
}

std::optional<std::string> declared_encoding(std::string_view doc) {
    if (!doc.starts_with("<?xml")) return std::nullopt;
    const auto end = doc.find("?>");
    const std::string_view decl = doc.substr(0, std::min(end, std::size_t{1024}));
    const auto key = decl.find("encoding");
    if (key == std::string_view::npos) return std::nullopt;
    std::size_t i = key + 8;
    while (i < decl.size() && (is_space(decl[i]) || decl[i] == '=')) ++i;
    if (i >= decl.size() || (decl[i] != '"' && decl[i] != '\'')) return std::nullopt;
    const char quote = decl[i++];
    const auto close = decl.find(quote, i);
    if (close == std::string_view::npos) return std::nullopt;
    return std::string(decl.substr(i, close - i));
}

std::string transcode(std::string_view bytes, const std::string& charset) {
    UErrorCode status = U_ZERO_ERROR;
    std::unique_ptr<UConverter, decltype(&ucnv_close)> conv(ucnv_open(charset.c_str(), &status), ucnv_close);
    if (U_FAILURE(status)) throw ParseError("unsupported encoding '" + charset + "'", 1, 1, 0);
    icu::UnicodeString text(bytes.data(), static_cast<int32_t>(bytes.size()), conv.get(), status);
    if (U_FAILURE(status)) throw ParseError("cannot decode document as '" + charset + "'", 1, 1, 0);
    return utf8_from_unicode(text);
}

/// Every document is handed to the XML parser as UTF-8 with invalid
/// sequences replaced by U+FFFD.
std::string to_utf8(std::string_view doc) {
    std::string out;
    auto starts = [&](std::initializer_list<unsigned char> prefix) {
        if (doc.size() < prefix.size()) return false;
        std::size_t i = 0;
        for (unsigned char c : prefix) {
            if (static_cast<unsigned char>(doc[i++]) != c) return false;
        }
        return true;
    };
    if (starts({0xEF, 0xBB, 0xBF})) {
        out = utf8_from_unicode(icu::UnicodeString::fromUTF8(doc.substr(3)));
    } else if (starts({0xFE, 0xFF}) || starts({0x00, 0x3C, 0x00, 0x3F})) {
        out = transcode(doc, "UTF-16BE");
    } else if (starts({0xFF, 0xFE}) || starts({0x3C, 0x00, 0x3F, 0x00})) {
        out = transcode(doc, "UTF-16LE");
    } else {
        const auto charset = declared_encoding(doc);
        if (!charset || iequals(*charset, "utf-8") || iequals(*charset, "utf8") ||
            iequals(*charset, "us-ascii")) {
            out = utf8_from_unicode(icu::UnicodeString::fromUTF8(doc));
        } else {
            out = transcode(doc, *charset);
        }
    }
    // A leading U+FEFF survives transcoding from UTF-16 with BOM.
    if (out.starts_with("\xEF\xBB\xBF")) out.erase(0, 3);
    blank_controls(out);
    return out;
}

// ---- expat driver ---------------------------------------------------------

using Attributes = std::vector<std::pair<std::string_view, std::string_view>>;

class XmlHandler {
public:
    virtual ~XmlHandler() = default;
    /// Returning false stops the parse (root rejected).
    virtual bool start(std::string_view name, const Attributes& attrs) = 0;
    virtual void end(std::string_view name) = 0;
    virtual void text(std::string_view data) = 0;
};

struct ExpatContext {
    XML_Parser parser = nullptr;
    XmlHandler* handler = nullptr;
    bool rejected = false;
    std::exception_ptr error;
    Attributes attrs;
};

/// Exceptions must not unwind through expat's C frames; park them and stop.
template <typename Body>
void guarded(ExpatContext* c, Body&& body) {
    if (c->rejected || c->error) return;
    try {
        body();
    } catch (...) {
        c->error = std::current_exception();
        XML_StopParser(c->parser, XML_FALSE);
    }
}

/// Runs expat over UTF-8 input. Returns false when the handler rejected the root.
bool run_expat(const std::string& utf8, XmlHandler& handler) {
    std::unique_ptr<std::remove_pointer_t<XML_Parser>, decltype(&XML_ParserFree)> parser(
        XML_ParserCreateNS("UTF-8", kNsSep), XML_ParserFree);
    if (!parser) throw Error("cannot allocate XML parser");
    ExpatContext ctx;
    ctx.parser = parser.get();
    ctx.handler = &handler;
    XML_SetUserData(parser.get(), &ctx);
    XML_SetElementHandler(
        parser.get(),
        [](void* data, const XML_Char* name, const XML_Char** atts) {
            auto* c = static_cast<ExpatContext*>(data);
            guarded(c, [&] {
                c->attrs.clear();
                for (std::size_t i = 0; atts[i] != nullptr; i += 2) c->attrs.emplace_back(atts[i], atts[i + 1]);
                if (!c->handler->start(name, c->attrs)) {
                    c->rejected = true;
                    XML_StopParser(c->parser, XML_FALSE);
                }
            });
        },
        [](void* data, const XML_Char* name) {
            auto* c = static_cast<ExpatContext*>(data);
            guarded(c, [&] { c->handler->end(name); });
        });
    XML_SetCharacterDataHandler(parser.get(), [](void* data, const XML_Char* s, int len) {
        auto* c = static_cast<ExpatContext*>(data);
        guarded(c, [&] { c->handler->text(std::string_view(s, static_cast<std::size_t>(len))); });
    });

    constexpr std::size_t kChunk = 1 << 20;
    std::size_t pos = 0;
    do {
        const std::size_t n = std::min(kChunk, utf8.size() - pos);
        const bool final = pos + n == utf8.size();
        const auto status = XML_Parse(parser.get(), utf8.data() + pos, static_cast<int>(n), final);
        if (ctx.error) std::rethrow_exception(ctx.error);
        if (ctx.rejected) return false;
        if (status == XML_STATUS_ERROR) {
            throw ParseError(XML_ErrorString(XML_GetErrorCode(parser.get())),
                             static_cast<long>(XML_GetCurrentLineNumber(parser.get())),
                             static_cast<long>(XML_GetCurrentColumnNumber(parser.get())) + 1,
                             static_cast<long>(XML_GetCurrentByteIndex(parser.get())));
        }
        pos += n;
    } while (pos < utf8.size());
    return true;
}

std::string_view attr(const Attributes& attrs, std::string_view key) {
    for (const auto& [k, v] : attrs) {
        if (k == key) return v;
    }
    return {};
}

bool has_attr(const Attributes& attrs, std::string_view key) {
    return std::any_of(attrs.begin(), attrs.end(), [&](const auto& kv) { return kv.first == key; });
}

std::string atom(std::string_view local) { return std::string(kAtomNs) + kNsSep + std::string(local); }

bool is_block_element(std::string_view local) {
    static const std::unordered_set<std::string_view> block = {
        "p",  "br", "div", "li", "ul", "ol", "h1", "h2", "h3", "h4",         "h5",
        "h6", "tr", "td",  "th", "hr", "table", "blockquote", "pre", "section", "article"};
    return block.contains(local);
}

std::string_view local_name(std::string_view qname) {
    const auto sep = qname.rfind(kNsSep);
    return sep == std::string_view::npos ? qname : qname.substr(sep + 1);
}

// ---- feed handler ---------------------------------------------------------

enum class TextKind { Text, Html, Xhtml };

struct RawEntry {
    std::string title;
    TextKind title_kind = TextKind::Text;
    std::optional<std::string> summary;
    TextKind summary_kind = TextKind::Html;
    std::string link;
    bool link_preferred = false;
    std::string base;  // xml:base in effect on the link element
};

class FeedHandler final : public XmlHandler {
public:
    enum class Format { Unknown, Rss, Atom };

    bool start(std::string_view name, const Attributes& attrs) override {
        const std::size_t depth = path_.size();
        path_.emplace_back(name);
        std::string base = bases_.empty() ? std::string() : bases_.back();
        if (has_attr(attrs, kXmlBase)) {
            const std::string declared(attr(attrs, kXmlBase));
            base = base.empty() ? declared : resolve_url(base, declared).value_or(declared);
        }
        bases_.push_back(base);

        if (depth == 0) {
            if (name == "rss") {
                format_ = Format::Rss;
            } else if (name == atom("feed")) {
                format_ = Format::Atom;
            } else {
                root_ = std::string(name);
                return false;
            }
            return true;
        }
        if (capture_ && capture_kind_ == TextKind::Xhtml && is_block_element(local_name(name))) buffer_ += ' ';
        if (capture_) return true;

        if (format_ == Format::Rss) start_rss(name, depth);
        else start_atom(name, attrs, depth);
        return true;
    }

    void end(std::string_view name) override {
        const std::size_t depth = path_.size() - 1;
        if (capture_ && depth == capture_depth_) finish_capture();
        else if (capture_ && capture_kind_ == TextKind::Xhtml && is_block_element(local_name(name))) buffer_ += ' ';
        if (entry_ && depth == entry_depth_) {
            entries_.push_back(std::move(*entry_));
            entry_.reset();
        }
        path_.pop_back();
        bases_.pop_back();
    }

    void text(std::string_view data) override {
        if (capture_) buffer_.append(data);
    }

    Format format() const { return format_; }
    const std::string& root() const { return root_; }

    ParsedFeed finish(const std::string& feed_id, Timestamp fetched_at, std::string_view fetch_url) {
        ParsedFeed feed;
        if (auto title = collapse_whitespace(channel_title_); !title.empty()) feed.title = std::move(title);
        std::string doc_base(fetch_url);
        if (auto link = collapse_whitespace(channel_link_); !link.empty()) {
            if (auto resolved = resolve_url(fetch_url, link)) {
                feed.link = *resolved;
                doc_base = *resolved;
            }
        }
        std::unordered_set<std::string> seen;
        for (auto& raw : entries_) {
            std::string headline = render(raw.title, raw.title_kind);
            if (headline.empty() || raw.link.empty()) continue;
            std::string base = doc_base;
            if (!raw.base.empty()) base = resolve_url(doc_base, raw.base).value_or(raw.base);
            auto hyperlink = resolve_url(base, collapse_whitespace(raw.link));
            if (!hyperlink || !seen.insert(*hyperlink).second) continue;
            NewsItem item;
            item.headline = std::move(headline);
            item.hyperlink = std::move(*hyperlink);
            if (raw.summary) {
                std::string summary = render(*raw.summary, raw.summary_kind);
                if (!summary.empty()) item.summary = std::move(summary);
            }
            item.feed_id = feed_id;
            item.fetched_at = fetched_at;
            feed.items.push_back(std::move(item));
        }
        return feed;
    }

private:
    static std::string render(const std::string& text, TextKind kind) {
        return kind == TextKind::Html ? strip_markup(text) : collapse_whitespace(text);
    }

    static TextKind atom_kind(const Attributes& attrs) {
        const auto type = attr(attrs, "type");
        if (type == "html") return TextKind::Html;
        if (type == "xhtml") return TextKind::Xhtml;
        return TextKind::Text;
    }

    void start_rss(std::string_view name, std::size_t depth) {
        // rss / channel / item / field
        if (depth == 2 && path_[1] == "channel") {
            if (name == "title") begin_capture(&channel_title_, TextKind::Text);
            else if (name == "link") begin_capture(&channel_link_, TextKind::Text);
            else if (name == "item") begin_entry(depth);
        } else if (entry_ && depth == entry_depth_ + 1) {
            if (name == "title") begin_capture(&entry_->title, TextKind::Text);
            else if (name == "link") begin_capture(&entry_->link, TextKind::Text);
            else if (name == "description") begin_capture(&entry_->summary.emplace(), TextKind::Html);
        }
    }

    void start_atom(std::string_view name, const Attributes& attrs, std::size_t depth) {
        if (depth == 1) {
            if (name == atom("title")) begin_capture(&channel_title_, atom_kind(attrs));
            else if (name == atom("link")) take_link(attrs, channel_link_, channel_link_preferred_);
            else if (name == atom("entry")) begin_entry(depth);
        } else if (entry_ && depth == entry_depth_ + 1) {
            if (name == atom("title")) {
                entry_->title_kind = atom_kind(attrs);
                begin_capture(&entry_->title, entry_->title_kind);
            } else if (name == atom("summary")) {
                entry_->summary_kind = atom_kind(attrs);
                // Plain-text summaries may still carry markup-looking text; strip regardless.
                if (entry_->summary_kind == TextKind::Text) entry_->summary_kind = TextKind::Html;
                begin_capture(&entry_->summary.emplace(), entry_->summary_kind);
            } else if (name == atom("link")) {
                if (take_link(attrs, entry_->link, entry_->link_preferred)) entry_->base = bases_.back();
            }
        }
    }

    /// rel="alternate" (or no rel) wins; otherwise the first link with an href.
    static bool take_link(const Attributes& attrs, std::string& link, bool& preferred) {
        const auto href = attr(attrs, "href");
        if (href.empty() || preferred) return false;
        const auto rel = attr(attrs, "rel");
        const bool alternate = rel.empty() || rel == "alternate";
        if (!alternate && !link.empty()) return false;
        link = collapse_whitespace(href);
        preferred = alternate;
        return true;
    }

    void begin_entry(std::size_t depth) {
        entry_.emplace();
        entry_depth_ = depth;
    }

    void begin_capture(std::string* target, TextKind kind) {
        capture_ = target;
        capture_kind_ = kind;
        capture_depth_ = path_.size() - 1;
        buffer_.clear();
    }

    void finish_capture() {
        // Repeated fields: the first one wins.
        if (capture_->empty()) *capture_ = std::move(buffer_);
        buffer_.clear();
        capture_ = nullptr;
    }

    Format format_ = Format::Unknown;
    std::string root_;
    std::vector<std::string> path_;
    std::vector<std::string> bases_;
    std::string channel_title_;
    std::string channel_link_;
    bool channel_link_preferred_ = false;
    std::optional<RawEntry> entry_;
    std::size_t entry_depth_ = 0;
    std::vector<RawEntry> entries_;
    std::string* capture_ = nullptr;
    TextKind capture_kind_ = TextKind::Text;
    std::size_t capture_depth_ = 0;
    std::string buffer_;
};

class OpmlHandler final : public XmlHandler {
public:
    bool start(std::string_view name, const Attributes& attrs) override {
        if (depth_++ == 0) return name == "opml";
        if (name != "outline") return true;
        const std::string url = collapse_whitespace(attr(attrs, "xmlUrl"));
        if (url.empty()) return true;
        auto absolute = resolve_url({}, url);
        if (!absolute || !seen_.insert(*absolute).second) return true;
        FeedSource source;
        source.url = *absolute;
        source.feed_id = feed_id_for_url(source.url);
        std::string title = collapse_whitespace(attr(attrs, "title"));
        if (title.empty()) title = collapse_whitespace(attr(attrs, "text"));
        if (!title.empty()) source.title = std::move(title);
        sources_.push_back(std::move(source));
        return true;
    }
    void end(std::string_view) override { --depth_; }
    void text(std::string_view) override {}

    std::vector<FeedSource> take() { return std::move(sources_); }

private:
    int depth_ = 0;
    std::unordered_set<std::string> seen_;
    std::vector<FeedSource> sources_;
};

// ---- HTML fragments -------------------------------------------------------

std::optional<char32_t> named_entity(std::string_view name) {
    static const std::array<std::pair<std::string_view, char32_t>, 32> table{{
        {"amp", U'&'},       {"lt", U'<'},         {"gt", U'>'},         {"quot", U'"'},
        {"apos", U'\''},     {"nbsp", U' '},       {"ndash", U'\u2013'}, {"mdash", U'\u2014'},
        {"lsquo", U'‘'}, {"rsquo", U'’'}, {"ldquo", U'“'}, {"rdquo", U'”'},
        {"hellip", U'…'}, {"copy", U'©'}, {"reg", U'®'},  {"trade", U'™'},
        {"laquo", U'«'}, {"raquo", U'»'}, {"middot", U'·'}, {"bull", U'•'},
        {"euro", U'€'}, {"pound", U'£'}, {"deg", U'°'},   {"times", U'×'},
        {"eacute", U'é'}, {"egrave", U'è'}, {"aacute", U'á'}, {"oacute", U'ó'},
        {"iacute", U'í'}, {"uacute", U'ú'}, {"ntilde", U'ñ'}, {"uuml", U'ü'},
    }};
    for (const auto& [k, v] : table) {
        if (k == name) return v;
    }
    return std::nullopt;
}

/// Decodes the entity at html[pos] == '&'. Returns characters consumed, 0 if not an entity.
std::size_t decode_entity(std::string_view html, std::size_t pos, std::string& out) {
    const auto semi = html.find(';', pos + 1);
    if (semi == std::string_view::npos || semi - pos > 12) return 0;
    const std::string_view body = html.substr(pos + 1, semi - pos - 1);
    if (body.empty()) return 0;
    if (body[0] == '#') {
        const bool hex = body.size() > 1 && (body[1] == 'x' || body[1] == 'X');
        const std::string_view digits = body.substr(hex ? 2 : 1);
        if (digits.empty()) return 0;
        char32_t cp = 0;
        for (char c : digits) {
            const int d = std::isdigit(static_cast<unsigned char>(c)) ? c - '0'
                          : hex && std::isxdigit(static_cast<unsigned char>(c))
                              ? std::tolower(static_cast<unsigned char>(c)) - 'a' + 10
                              : -1;
            if (d < 0) return 0;
            cp = std::min<char32_t>(cp * (hex ? 16 : 10) + static_cast<char32_t>(d), 0x110000);
        }
        append_utf8(out, cp);
        return semi - pos + 1;
    }
    if (auto cp = named_entity(body)) {
        append_utf8(out, *cp);
        return semi - pos + 1;
    }
    return 0;
}

bool starts_tag(std::string_view html, std::size_t pos) {
    if (pos + 1 >= html.size()) return false;
    const auto c = static_cast<unsigned char>(html[pos + 1]);
    return std::isalpha(c) || c == '/' || c == '!' || c == '?';
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

}  // namespace

std::string strip_markup(std::string_view html) {
    std::string out;
    out.reserve(html.size());
    std::size_t i = 0;
    while (i < html.size()) {
        const char c = html[i];
        if (c == '<' && starts_tag(html, i)) {
            if (html.substr(i, 4) == "<!--") {
                const auto close = html.find("-->", i + 4);
                i = close == std::string_view::npos ? html.size() : close + 3;
                continue;
            }
            const auto close = html.find('>', i + 1);
            if (close == std::string_view::npos) break;
            std::size_t name_start = i + 1 + (html[i + 1] == '/' ? 1 : 0);
            std::size_t name_end = name_start;
            while (name_end < close && std::isalnum(static_cast<unsigned char>(html[name_end]))) ++name_end;
            const std::string name = lower_ascii(html.substr(name_start, name_end - name_start));
            i = close + 1;
            if (html[name_start - 1] != '/' && (name == "script" || name == "style")) {
                const auto end_tag = lower_ascii(html.substr(i)).find("</" + name);
                if (end_tag == std::string::npos) break;
                const auto end_close = html.find('>', i + end_tag);
                i = end_close == std::string_view::npos ? html.size() : end_close + 1;
                continue;
            }
            if (is_block_element(name)) out += ' ';
            continue;
        }
        if (c == '&') {
            if (const std::size_t used = decode_entity(html, i, out)) {
                i += used;
                continue;
            }
        }
        out += c;
        ++i;
    }
    // U+00A0 from &nbsp; or raw input counts as a separator.
    std::string spaced;
    spaced.reserve(out.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
        if (out.compare(k, 2, "\xC2\xA0") == 0) {
            spaced += ' ';
            ++k;
        } else {
            spaced += out[k];
        }
    }
    return collapse_whitespace(spaced);
}

std::optional<std::string> resolve_url(std::string_view base, std::string_view reference) {
    std::unique_ptr<CURLU, decltype(&curl_url_cleanup)> url(curl_url(), curl_url_cleanup);
    if (!url) return std::nullopt;
    const unsigned int flags = CURLU_NON_SUPPORT_SCHEME | CURLU_URLENCODE;
    const std::string ref(reference);
    if (ref.empty()) return std::nullopt;
    if (!base.empty() && curl_url_set(url.get(), CURLUPART_URL, std::string(base).c_str(), flags) != CURLUE_OK) {
        url.reset(curl_url());
    }
    if (curl_url_set(url.get(), CURLUPART_URL, ref.c_str(), flags) != CURLUE_OK) return std::nullopt;
    char* host = nullptr;
    if (curl_url_get(url.get(), CURLUPART_HOST, &host, 0) != CURLUE_OK) return std::nullopt;
    curl_free(host);
    char* full = nullptr;
    if (curl_url_get(url.get(), CURLUPART_URL, &full, 0) != CURLUE_OK) return std::nullopt;
    std::string out(full);
    curl_free(full);
    return out;
}

std::string feed_id_for_url(std::string_view url) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : url) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return std::string("f") + buf;
}

ParsedFeed parse_feed_document(std::string_view document, const std::string& feed_id,
                               Timestamp fetched_at, std::string_view fetch_url) {
    const std::string utf8 = to_utf8(document);
    FeedHandler handler;
    if (!run_expat(utf8, handler)) {
        throw UnknownFormat("root element <" + std::string(local_name(handler.root())) +
                            "> is neither RSS nor Atom");
    }
    return handler.finish(feed_id, fetched_at, fetch_url);
}

std::vector<NewsItem> parse_feed(std::string_view document, const std::string& feed_id,
                                 Timestamp fetched_at, std::string_view fetch_url) {
    return parse_feed_document(document, feed_id, fetched_at, fetch_url).items;
}

std::vector<FeedSource> import_opml(std::string_view document) {
    const std::string utf8 = to_utf8(document);
    OpmlHandler handler;
    if (!run_expat(utf8, handler)) throw ParseError("root element is not <opml>", 1, 1, 0);
    return handler.take();
}

}  // namespace feedrank
