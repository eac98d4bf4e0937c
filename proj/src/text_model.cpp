#include "feedrank/text_model.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include "feedrank/errors.hpp"

namespace feedrank {

TermVector::TermVector(std::initializer_list<Entry> entries)
    : TermVector(from_entries(std::vector<Entry>(entries))) {}

TermVector TermVector::from_entries(std::vector<Entry> entries) {
    auto by_term = [](const Entry& l, const Entry& r) { return l.first < r.first; };
    if (!std::is_sorted(entries.begin(), entries.end(), by_term)) {
        std::sort(entries.begin(), entries.end(), by_term);
    }
    TermVector out;
    out.entries_.reserve(entries.size());
    for (auto& entry : entries) {
        if (entry.first.empty()) throw InvalidInput("empty term");
        if (!std::isfinite(entry.second) || entry.second < 0.0) {
            throw InvalidInput("invalid weight for term '" + entry.first + "'");
        }
        if (!out.entries_.empty() && out.entries_.back().first == entry.first) {
            throw InvalidInput("duplicate term '" + entry.first + "'");
        }
        if (entry.second > 0.0) out.entries_.push_back(std::move(entry));
    }
    return out;
}

namespace {

auto find_term(std::span<const TermVector::Entry> entries, std::string_view term) {
    auto it = std::lower_bound(entries.begin(), entries.end(), term,
                               [](const TermVector::Entry& e, std::string_view t) {
                                   return std::string_view(e.first) < t;
                               });
    return (it != entries.end() && it->first == term) ? it : entries.end();
}

}  // namespace

double TermVector::weight(std::string_view term) const noexcept {
    auto it = find_term(entries_, term);
    return it == entries().end() ? 0.0 : it->second;
}

bool TermVector::contains(std::string_view term) const noexcept {
    return find_term(entries_, term) != entries().end();
}

double TermVector::sum() const noexcept {
    double total = 0.0;
    for (const auto& [term, w] : entries_) total += w;
    return total;
}

double TermVector::squared_norm() const noexcept {
    double total = 0.0;
    for (const auto& [term, w] : entries_) total += w * w;
    return total;
}

double TermVector::norm() const noexcept { return std::sqrt(squared_norm()); }

TermVector TermVector::scaled(double factor) const {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw InvalidInput("scale must be positive");
    std::vector<Entry> out;
    out.reserve(entries_.size());
    for (const auto& [term, w] : entries_) {
        double v = w * factor;
        if (v > 0.0) out.emplace_back(term, v);
    }
    return from_entries(std::move(out));
}

TermVector vector_sum_scaled(std::span<const TermVector> vectors, double scale) {
    if (!(scale > 0.0) || !std::isfinite(scale)) throw InvalidInput("scale must be positive");
    std::map<std::string, double> acc;
    for (const auto& v : vectors) {
        for (const auto& [term, w] : v) acc[term] += w;
    }
    std::vector<TermVector::Entry> out;
    out.reserve(acc.size());
    for (auto& [term, w] : acc) {
        double v = w * scale;
        if (v > 0.0) out.emplace_back(term, v);
    }
    return TermVector::from_entries(std::move(out));
}

TermVector tf_vector(const TokenStream& tokens) {
    if (tokens.empty()) return {};
    std::map<std::string, std::size_t> counts;
    for (const auto& t : tokens) ++counts[t];
    const double total = static_cast<double>(tokens.size());
    std::vector<TermVector::Entry> out;
    out.reserve(counts.size());
    for (const auto& [term, n] : counts) out.emplace_back(term, static_cast<double>(n) / total);
    return TermVector::from_entries(std::move(out));
}

namespace {

const icu::Normalizer2& nfc() {
    UErrorCode status = U_ZERO_ERROR;
    const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
    if (U_FAILURE(status) || n == nullptr) throw Error("ICU NFC normalizer unavailable");
    return *n;
}

icu::UnicodeString normalized(std::string_view utf8_text) {
    // Invalid UTF-8 is replaced with U+FFFD by fromUTF8.
    auto text = icu::UnicodeString::fromUTF8(
        icu::StringPiece(utf8_text.data(), static_cast<int32_t>(utf8_text.size())));
    text.toLower(icu::Locale::getRoot());
    UErrorCode status = U_ZERO_ERROR;
    auto out = nfc().normalize(text, status);
    if (U_FAILURE(status)) throw Error("NFC normalization failed");
    return out;
}

bool is_word_char(UChar32 c) {
    if (u_isalnum(c)) return true;
    auto type = u_charType(c);
    return type == U_NON_SPACING_MARK || type == U_COMBINING_SPACING_MARK;
}

bool is_joiner(UChar32 c) {
    return c == u'\'' || c == 0x2019 || c == u'-' || c == 0x2010 || c == 0x2011;
}

std::string to_utf8(const icu::UnicodeString& s) {
    std::string out;
    s.toUTF8String(out);
    return out;
}

}  // namespace

std::string normalize_text(std::string_view utf8_text) { return to_utf8(normalized(utf8_text)); }

const StopwordSet& default_stopwords() {
    static const StopwordSet words = {
        "about", "after", "all",   "also",  "am",    "an",    "and",   "any",   "are",
        "as",    "at",    "be",    "been",  "but",   "by",    "can",   "could", "did",
        "do",    "does",  "for",   "from",  "had",   "has",   "have",  "he",    "her",
        "his",   "how",   "if",    "in",    "into",  "is",    "it",    "its",   "just",
        "me",    "more",  "my",    "no",    "not",   "of",    "on",    "or",    "our",
        "out",   "over",  "she",   "so",    "than",  "that",  "the",   "their", "them",
        "then",  "there", "these", "they",  "this",  "to",    "up",    "us",    "was",
        "we",    "were",  "what",  "when",  "which", "who",   "why",   "will",  "with",
        "would", "you",   "your",
    };
    return words;
}

StopwordSet load_stopwords(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read stopword file " + path.string());
    StopwordSet out;
    std::string line;
    while (std::getline(in, line)) {
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos || line[first] == '#') continue;
        auto last = line.find_last_not_of(" \t\r");
        out.insert(normalize_text(std::string_view(line).substr(first, last - first + 1)));
    }
    return out;
}

Tokenizer::Tokenizer() : stopwords_(default_stopwords()) {}

Tokenizer::Tokenizer(StopwordSet stopwords) : stopwords_(std::move(stopwords)) {}

TokenStream Tokenizer::operator()(std::string_view utf8_text) const {
    const icu::UnicodeString text = normalized(utf8_text);
    TokenStream tokens;
    icu::UnicodeString current;
    int32_t current_length = 0;  // in code points

    auto flush = [&] {
        if (current_length > 1) {
            std::string term = to_utf8(current);
            if (!stopwords_.contains(term)) tokens.push_back(std::move(term));
        }
        current.remove();
        current_length = 0;
    };

    const int32_t n = text.length();
    for (int32_t i = 0; i < n;) {
        UChar32 c = text.char32At(i);
        int32_t next = i + U16_LENGTH(c);
        if (is_word_char(c)) {
            current.append(c);
            ++current_length;
        } else if (is_joiner(c) && current_length > 0 && next < n &&
                   is_word_char(text.char32At(next))) {
            current.append(c == 0x2019 ? UChar32(u'\'') : (c == 0x2010 || c == 0x2011) ? UChar32(u'-') : c);
            ++current_length;
        } else {
            flush();
        }
        i = next;
    }
    flush();
    return tokens;
}

TokenStream tokenize(std::string_view utf8_text) {
    static const Tokenizer tokenizer;
    return tokenizer(utf8_text);
}

}  // namespace feedrank
