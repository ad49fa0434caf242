#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cirdil {

// A token is a non-empty lowercase word without whitespace or punctuation.
using Token = std::string;
using TokenSeq = std::vector<Token>;

namespace detail {

// Decodes one UTF-8 code point starting at s[i]; advances i. Invalid bytes decode
// to U+FFFD and consume one byte.
inline char32_t next_code_point(std::string_view s, std::size_t& i) noexcept {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) {
        ++i;
        return b0;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFD;
    }
    if (i + len > s.size()) {
        ++i;
        return 0xFFFD;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFD;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += len;
    return cp;
}

inline bool is_word_code_point(char32_t cp) noexcept {
    if (cp < 0x80) {
        return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
    }
    // Non-ASCII: everything is a word character except the common space and
    // punctuation blocks below. No locale or Unicode database is consulted, so
    // the rule is identical on every platform.
    if (cp >= 0x80 && cp <= 0xBF) return false;                 // Latin-1 controls, NBSP, ¡…¿
    if (cp == 0xD7 || cp == 0xF7) return false;                 // × ÷
    if (cp >= 0x2000 && cp <= 0x206F) return false;             // general punctuation, dashes, spaces
    if (cp >= 0x2E00 && cp <= 0x2E7F) return false;             // supplemental punctuation
    if (cp >= 0x3000 && cp <= 0x303F) return false;             // CJK symbols and punctuation
    if (cp == 0xFEFF || cp == 0xFFFD) return false;             // BOM, replacement char
    if (cp >= 0xFF00 && cp <= 0xFF0F) return false;             // fullwidth punctuation
    return true;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

}  // namespace detail

/// Splits text into lowercase word tokens. Any character that is not an ASCII
/// letter/digit or a non-punctuation non-ASCII code point acts as a separator and
/// is dropped. Only ASCII A-Z are case-folded.
inline TokenSeq tokenize(std::string_view text) {
    TokenSeq tokens;
    std::string current;
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = detail::next_code_point(text, i);
        if (detail::is_word_code_point(cp)) {
            if (cp >= 'A' && cp <= 'Z') {
                current.push_back(static_cast<char>(cp - 'A' + 'a'));
            } else {
                detail::append_utf8(current, cp);
            }
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

inline std::string join_tokens(std::span<const Token> tokens) {
    std::string out;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (i) out.push_back(' ');
        out += tokens[i];
    }
    return out;
}

// True if t satisfies the Token invariant (non-empty and a fixed point of tokenize).
inline bool is_valid_token(std::string_view t) {
    const TokenSeq once = tokenize(t);
    return once.size() == 1 && once.front() == t;
}

}  // namespace cirdil
