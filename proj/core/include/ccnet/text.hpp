#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ccnet::text {

/// Decodes UTF-8 into Unicode scalar values. Invalid byte sequences
/// decode to U+FFFD, consuming one byte at a time.
std::vector<char32_t> utf8_decode(std::string_view s);

void utf8_append(std::string& out, char32_t cp);
std::string utf8_encode(const std::vector<char32_t>& cps);

/// ASCII-only lowercasing; other code points pass through.
char32_t ascii_lower(char32_t c);
std::string ascii_lower(std::string_view s);

/// Byte span [begin, end) into the original string.
struct Span {
    std::size_t begin = 0;
    std::size_t end = 0;

    bool empty() const { return begin >= end; }
};

/// Whitespace-delimited tokens, as byte spans. Whitespace is the ASCII
/// set (space, tab, newline, carriage return, vertical tab, form feed).
std::vector<Span> split_whitespace(std::string_view s);

/// Trims leading/trailing ASCII punctuation from a token span, returning
/// the core span (possibly empty for all-punctuation tokens).
Span strip_punctuation(std::string_view s, Span token);

/// Lowercased punctuation-stripped word tokens of a text, the shared
/// tokenization for thesaurus matching and bag-of-words counting.
std::vector<std::string> word_tokens(std::string_view s);

} // namespace ccnet::text
