#include "ccnet/text.hpp"

#include <cctype>

namespace ccnet::text {

namespace {

constexpr char32_t kReplacement = 0xFFFD;

bool is_ascii_space(unsigned char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

bool is_ascii_punct(unsigned char c) {
    return c < 0x80 && std::ispunct(c);
}

} // namespace

std::vector<char32_t> utf8_decode(std::string_view s) {
    std::vector<char32_t> out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        const unsigned char b0 = static_cast<unsigned char>(s[i]);
        if (b0 < 0x80) {
            out.push_back(b0);
            ++i;
            continue;
        }
        std::size_t need;
        char32_t cp;
        if ((b0 & 0xE0) == 0xC0) {
            need = 1;
            cp = b0 & 0x1F;
        } else if ((b0 & 0xF0) == 0xE0) {
            need = 2;
            cp = b0 & 0x0F;
        } else if ((b0 & 0xF8) == 0xF0) {
            need = 3;
            cp = b0 & 0x07;
        } else {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        if (i + need >= s.size()) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        bool ok = true;
        for (std::size_t j = 1; j <= need; ++j) {
            const unsigned char b = static_cast<unsigned char>(s[i + j]);
            if ((b & 0xC0) != 0x80) {
                ok = false;
                break;
            }
            cp = (cp << 6) | (b & 0x3F);
        }
        if (!ok || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
            out.push_back(kReplacement);
            ++i;
            continue;
        }
        out.push_back(cp);
        i += need + 1;
    }
    return out;
}

void utf8_append(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

std::string utf8_encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) utf8_append(out, cp);
    return out;
}

char32_t ascii_lower(char32_t c) {
    return (c >= U'A' && c <= U'Z') ? c + (U'a' - U'A') : c;
}

std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

std::vector<Span> split_whitespace(std::string_view s) {
    std::vector<Span> tokens;
    std::size_t i = 0;
    while (i < s.size()) {
        while (i < s.size() && is_ascii_space(static_cast<unsigned char>(s[i]))) ++i;
        if (i >= s.size()) break;
        std::size_t start = i;
        while (i < s.size() && !is_ascii_space(static_cast<unsigned char>(s[i]))) ++i;
        tokens.push_back(Span{start, i});
    }
    return tokens;
}

Span strip_punctuation(std::string_view s, Span token) {
    std::size_t b = token.begin;
    std::size_t e = token.end;
    while (b < e && is_ascii_punct(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_ascii_punct(static_cast<unsigned char>(s[e - 1]))) --e;
    return Span{b, e};
}

std::vector<std::string> word_tokens(std::string_view s) {
    std::vector<std::string> words;
    for (Span t : split_whitespace(s)) {
        Span core = strip_punctuation(s, t);
        if (core.empty()) continue;
        words.push_back(ascii_lower(s.substr(core.begin, core.end - core.begin)));
    }
    return words;
}

} // namespace ccnet::text
