#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "ccnet/errors.hpp"
#include "ccnet/rng.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

/// Ranked synonym lists keyed by lowercase word or phrase (phrase keys
/// are space-joined word tokens). Index 0 is the closest synonym.
class Thesaurus {
public:
    Thesaurus() = default;

    /// TSV format: `key<TAB>syn1|syn2|...`, one entry per line.
    static Thesaurus load_tsv(const std::filesystem::path& path);

    /// Converts a MyThes-structured thesaurus (`word|n` header lines
    /// followed by n `(pos)|syn|syn...` lines). Part-of-speech tags and
    /// trailing parenthesized annotations are dropped; meanings are
    /// merged in order.
    static Thesaurus load_mythes(const std::filesystem::path& path);

    void add_entry(const std::string& key, std::vector<std::string> synonyms);
    const std::vector<std::string>* lookup(const std::string& key) const;

    bool empty() const { return entries_.empty(); }
    std::size_t size() const { return entries_.size(); }
    std::size_t max_key_tokens() const { return max_key_tokens_; }

    /// Keys are written in sorted order so output is reproducible.
    void save_tsv(const std::filesystem::path& path) const;

    const std::map<std::string, std::vector<std::string>>& entries() const {
        return entries_;
    }

private:
    std::map<std::string, std::vector<std::string>> entries_;
    std::size_t max_key_tokens_ = 0;
};

struct AugmentConfig {
    double p = 0.5; // replacement-count parameter
    double q = 0.5; // synonym-index parameter

    void validate() const;
};

/// Draws from P[i] = param^i / sum_{j<=max_value} param^j over
/// 0..max_value.
std::size_t sample_truncated_geometric(double param, std::size_t max_value, Rng& rng);

/// A thesaurus match inside a text: the byte span to substitute and the
/// matched key. Multi-word keys span from the first token's core to the
/// last token's core; surrounding punctuation stays in place.
struct ReplaceableUnit {
    text::Span span;
    std::string key;
};

/// Scans tokens left to right, trying phrase keys (up to 3 tokens,
/// longest first) before single words.
std::vector<ReplaceableUnit> find_replaceable(const std::string& text,
                                              const Thesaurus& thesaurus);

/// Replaces exactly `count` uniformly chosen replaceable units, each with
/// a synonym drawn by a truncated geometric over its ranked list. The
/// capitalization of the first letter is preserved.
std::string replace_synonyms(const std::string& text, const Thesaurus& thesaurus,
                             std::size_t count, double q, Rng& rng);

/// Full procedure: r ~ truncated geometric(p) over the replaceable-word
/// count, then replace_synonyms with r.
std::string augment(const std::string& text, const Thesaurus& thesaurus,
                    const AugmentConfig& config, Rng& rng);

} // namespace ccnet
