#include "ccnet/quantizer.hpp"

#include <algorithm>
#include <fstream>

namespace ccnet {

namespace {

// 26 letters, 10 digits, 32 punctuation marks, newline: 69 distinct
// characters.
constexpr std::string_view kStandardChars =
    "abcdefghijklmnopqrstuvwxyz0123456789-,;.!?:'\"/\\|_@#$%^&*~`+=<>()[]{}\n";

} // namespace

Alphabet Alphabet::standard() {
    return from_utf8(kStandardChars);
}

Alphabet Alphabet::standard_no_newline() {
    std::string_view chars = kStandardChars;
    chars.remove_suffix(1);
    return from_utf8(chars);
}

Alphabet Alphabet::from_utf8(std::string_view characters) {
    return from_characters(text::utf8_decode(characters));
}

Alphabet Alphabet::from_characters(std::vector<char32_t> characters) {
    if (characters.empty()) {
        throw DataError("Alphabet: empty character set");
    }
    Alphabet a;
    a.chars_ = std::move(characters);
    for (std::size_t i = 0; i < a.chars_.size(); ++i) {
        auto [it, inserted] = a.index_.emplace(a.chars_[i], i);
        if (!inserted) {
            std::string repr;
            text::utf8_append(repr, a.chars_[i]);
            throw DataError("Alphabet: duplicate character '" + repr + "' at positions " +
                            std::to_string(it->second) + " and " + std::to_string(i));
        }
    }
    return a;
}

Alphabet Alphabet::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("Alphabet: cannot open " + path.string());
    }
    std::vector<char32_t> chars;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) {
            throw DataError("Alphabet: " + path.string() + ":" +
                            std::to_string(line_no) + ": blank line");
        }
        char32_t c;
        if (line[0] == '\\' && line.size() == 2) {
            switch (line[1]) {
            case 'n': c = U'\n'; break;
            case 't': c = U'\t'; break;
            case 's': c = U' '; break;
            case '\\': c = U'\\'; break;
            default:
                throw DataError("Alphabet: " + path.string() + ":" +
                                std::to_string(line_no) + ": unknown escape '" + line +
                                "'");
            }
        } else {
            std::vector<char32_t> cps = text::utf8_decode(line);
            if (cps.size() != 1) {
                throw DataError("Alphabet: " + path.string() + ":" +
                                std::to_string(line_no) +
                                ": expected exactly one character, got '" + line + "'");
            }
            c = cps[0];
        }
        chars.push_back(c);
    }
    try {
        return from_characters(std::move(chars));
    } catch (const DataError& e) {
        throw DataError("Alphabet: " + path.string() + ": " + e.what());
    }
}

namespace detail {

std::vector<char32_t> prepare_codepoints(std::string_view utf8, std::size_t length,
                                         const EncodeOptions& options) {
    std::vector<char32_t> cps = text::utf8_decode(utf8);
    for (char32_t& c : cps) c = text::ascii_lower(c);
    if (cps.size() > length) {
        if (options.keep_last) {
            cps.erase(cps.begin(), cps.end() - static_cast<std::ptrdiff_t>(length));
        } else {
            cps.resize(length);
        }
    }
    std::reverse(cps.begin(), cps.end());
    return cps;
}

} // namespace detail

} // namespace ccnet
