#pragma once

#include <cstddef>
#include <filesystem>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <utility>
#include <vector>

namespace feedrank {

/// Ordered list of terms extracted from a text.
using TokenStream = std::vector<std::string>;

/// Sparse term -> weight map.
///
/// Entries are kept sorted by term with strictly positive, finite weights;
/// zero weights are never stored. Lookups are binary searches, and every
/// arithmetic helper walks entries in term order so results do not depend on
/// hashing or insertion history.
class TermVector {
public:
    using Entry = std::pair<std::string, double>;

    TermVector() = default;

    /// Throws InvalidInput on duplicate terms, empty terms, negative or
    /// non-finite weights. Zero weights are dropped.
    TermVector(std::initializer_list<Entry> entries);
    static TermVector from_entries(std::vector<Entry> entries);

    double weight(std::string_view term) const noexcept;
    bool contains(std::string_view term) const noexcept;

    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::span<const Entry> entries() const noexcept { return entries_; }
    auto begin() const noexcept { return entries_.begin(); }
    auto end() const noexcept { return entries_.end(); }

    double sum() const noexcept;
    double squared_norm() const noexcept;
    double norm() const noexcept;

    /// Multiplies every weight by `factor` (> 0).
    TermVector scaled(double factor) const;

    friend bool operator==(const TermVector&, const TermVector&) = default;

private:
    std::vector<Entry> entries_;
};

/// Entrywise sum of `vectors` multiplied by `scale` (> 0). Absent terms count as 0.
TermVector vector_sum_scaled(std::span<const TermVector> vectors, double scale);

/// Term frequency vector: count of each term over the stream length.
TermVector tf_vector(const TokenStream& tokens);

using StopwordSet = std::unordered_set<std::string>;

/// Small built-in English stopword list.
const StopwordSet& default_stopwords();

/// One term per line; blank lines and lines starting with '#' are ignored.
/// Entries are lowercased and NFC-normalized the same way tokens are.
StopwordSet load_stopwords(const std::filesystem::path& path);

/// Deterministic tokenizer.
///
/// Text is lowercased and NFC-normalized, then split on every code point that
/// is neither alphanumeric (any script) nor an apostrophe/hyphen sitting
/// between two word characters. Tokens of a single code point and stopwords
/// are dropped. No stemming.
class Tokenizer {
public:
    Tokenizer();
    explicit Tokenizer(StopwordSet stopwords);

    TokenStream operator()(std::string_view utf8_text) const;

    const StopwordSet& stopwords() const noexcept { return stopwords_; }

private:
    StopwordSet stopwords_;
};

/// Tokenizes with the default stopword list.
TokenStream tokenize(std::string_view utf8_text);

/// Lowercase + NFC, the normalization applied to text before splitting.
std::string normalize_text(std::string_view utf8_text);

}  // namespace feedrank
