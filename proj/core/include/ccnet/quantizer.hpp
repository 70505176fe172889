#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ccnet/errors.hpp"
#include "ccnet/frame_seq.hpp"
#include "ccnet/text.hpp"

namespace ccnet {

/// Ordered, duplicate-free character set. The standard alphabet has 69
/// distinct characters: 26 lowercase letters, 10 digits, 32 punctuation
/// marks and the newline.
class Alphabet {
public:
    static Alphabet standard();
    /// Standard alphabet with the newline folded into the zero class.
    static Alphabet standard_no_newline();

    /// One character per line; escapes: \n newline, \t tab, \s space,
    /// \\ backslash. Blank lines and duplicates are errors.
    static Alphabet from_file(const std::filesystem::path& path);

    static Alphabet from_characters(std::vector<char32_t> characters);
    static Alphabet from_utf8(std::string_view characters);

    std::size_t size() const { return chars_.size(); }
    char32_t at(std::size_t index) const { return chars_[index]; }
    const std::vector<char32_t>& characters() const { return chars_; }

    std::optional<std::size_t> index_of(char32_t c) const {
        auto it = index_.find(c);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

private:
    Alphabet() = default;

    std::vector<char32_t> chars_;
    std::unordered_map<char32_t, std::size_t> index_;
};

struct EncodeOptions {
    /// When a text is longer than the target length the default keeps
    /// the first l characters; this switches to keeping the last l.
    bool keep_last = false;
};

/// 1-of-m encoding of a text: frame f of column j is 1 when character
/// n+1-j (1-based, of the truncated text) is alphabet entry f. Columns
/// are filled in backward order, so column 0 holds the last kept
/// character. Out-of-alphabet characters yield all-zero columns, as do
/// unused trailing columns.
template <class T>
struct EncodedText {
    FrameSeq<T> frames;
    std::size_t chars_encoded = 0;
};

namespace detail {
/// Lowercased, truncated code points in emission (reversed) order.
std::vector<char32_t> prepare_codepoints(std::string_view utf8, std::size_t length,
                                         const EncodeOptions& options);
} // namespace detail

template <class T>
EncodedText<T> encode(std::string_view utf8, const Alphabet& alphabet,
                      std::size_t length, const EncodeOptions& options = {}) {
    if (length < 1) {
        throw ShapeError("encode: length must be >= 1");
    }
    std::vector<char32_t> reversed = detail::prepare_codepoints(utf8, length, options);
    EncodedText<T> out;
    out.frames = FrameSeq<T>(alphabet.size(), length);
    out.chars_encoded = reversed.size();
    for (std::size_t col = 0; col < reversed.size(); ++col) {
        if (auto row = alphabet.index_of(reversed[col])) {
            out.frames.at(*row, col) = T(1);
        }
    }
    return out;
}

/// Inverse of encode over the encoded prefix: zero columns decode to
/// U+FFFD. Throws DataError on a column that is neither zero nor one-hot.
template <class T>
std::string decode(const EncodedText<T>& encoded, const Alphabet& alphabet) {
    const FrameSeq<T>& m = encoded.frames;
    if (m.frames != alphabet.size()) {
        throw ShapeError("decode: encoding has " + std::to_string(m.frames) +
                         " frames but alphabet has " + std::to_string(alphabet.size()) +
                         " characters");
    }
    if (encoded.chars_encoded > m.length) {
        throw ShapeError("decode: chars_encoded " +
                         std::to_string(encoded.chars_encoded) + " exceeds length " +
                         std::to_string(m.length));
    }
    std::vector<char32_t> cps(encoded.chars_encoded, 0xFFFD);
    for (std::size_t col = 0; col < encoded.chars_encoded; ++col) {
        std::size_t hits = 0;
        std::size_t hit_row = 0;
        for (std::size_t f = 0; f < m.frames; ++f) {
            const T v = m.at(f, col);
            if (v == T(0)) continue;
            if (v != T(1)) {
                throw DataError("decode: column " + std::to_string(col) +
                                " holds non-binary value");
            }
            ++hits;
            hit_row = f;
        }
        if (hits > 1) {
            throw DataError("decode: column " + std::to_string(col) +
                            " is not one-hot (" + std::to_string(hits) + " set rows)");
        }
        if (hits == 1) cps[col] = alphabet.at(hit_row);
    }
    // Columns are in backward order; flip back to reading order.
    std::vector<char32_t> ordered(cps.rbegin(), cps.rend());
    return text::utf8_encode(ordered);
}

} // namespace ccnet
