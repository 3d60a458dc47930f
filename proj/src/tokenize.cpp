#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "lvmr/aural.hpp"

namespace lvmr {
namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one codepoint starting at `pos`, advancing it. Malformed sequences
// consume one byte and yield kInvalid.
char32_t next_codepoint(std::string_view s, std::size_t& pos)
{
    const auto lead = static_cast<unsigned char>(s[pos]);
    if (lead < 0x80) {
        ++pos;
        return lead;
    }
    std::size_t length = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        length = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        length = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        length = 4;
        cp = lead & 0x07;
    } else {
        ++pos;
        return kInvalid;
    }
    if (pos + length > s.size()) {
        ++pos;
        return kInvalid;
    }
    for (std::size_t i = 1; i < length; ++i) {
        const auto cont = static_cast<unsigned char>(s[pos + i]);
        if ((cont & 0xC0) != 0x80) {
            ++pos;
            return kInvalid;
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    constexpr std::array<char32_t, 5> min_for_length{0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_length[length] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kInvalid;
    }
    pos += length;
    return cp;
}

void append_utf8(std::string& out, char32_t cp)
{
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

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

bool is_word_codepoint(char32_t cp)
{
    if (cp == kInvalid) {
        return false;
    }
    if (cp < 0x80) {
        return in(cp, '0', '9') || in(cp, 'a', 'z') || in(cp, 'A', 'Z');
    }
    if (in(cp, 0x80, 0xBF)) {
        return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
    }
    if (cp == 0xD7 || cp == 0xF7) {
        return false;
    }
    // Punctuation and symbol blocks.
    if (in(cp, 0x2000, 0x206F) || in(cp, 0x20A0, 0x20CF) || in(cp, 0x2190, 0x2BFF) ||
        in(cp, 0x3000, 0x303F) || in(cp, 0xFE10, 0xFE6F) || cp == 0xFEFF ||
        in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) ||
        in(cp, 0xFF5B, 0xFF65) || in(cp, 0x1F000, 0x1FAFF) || cp == 0x1680) {
        return false;
    }
    return true;
}

char32_t to_lower(char32_t cp)
{
    if (in(cp, 'A', 'Z')) {
        return cp + 0x20;
    }
    if (cp < 0xC0) {
        return cp;
    }
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    if (in(cp, 0x0100, 0x0137) || in(cp, 0x014A, 0x0177)) {
        return cp | 1;
    }
    if ((in(cp, 0x0139, 0x0148) || in(cp, 0x0179, 0x017E)) && (cp & 1)) {
        return cp + 1;
    }
    if (cp == 0x0178) {
        return 0xFF;
    }
    if (cp == 0x0386) {
        return 0x03AC;
    }
    if (in(cp, 0x0388, 0x038A)) {
        return cp + 0x25;
    }
    if (cp == 0x038C) {
        return 0x03CC;
    }
    if (in(cp, 0x038E, 0x038F)) {
        return cp + 0x3F;
    }
    if (in(cp, 0x0391, 0x03A9) && cp != 0x03A2) {
        return cp + 0x20;
    }
    if (in(cp, 0x0400, 0x040F)) {
        return cp + 0x50;
    }
    if (in(cp, 0x0410, 0x042F)) {
        return cp + 0x20;
    }
    return cp;
}

constexpr std::array<std::string_view, 40> kStopwords{
    "a",    "an",   "and",  "are",  "as",   "at",   "be",   "but",  "by",   "for",
    "from", "has",  "have", "he",   "her",  "his",  "i",    "in",   "into", "is",
    "it",   "its",  "of",   "on",   "or",   "our",  "she",  "so",   "that", "the",
    "then", "they", "this", "to",   "was",  "we",   "with", "you",  "your", "will"};

bool is_stopword(std::string_view token)
{
    for (auto word : kStopwords) {
        if (word == token) {
            return true;
        }
    }
    return false;
}

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options)
{
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            if (!options.filter_stopwords || !is_stopword(current)) {
                tokens.push_back(std::move(current));
            }
            current.clear();
        }
    };

    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = next_codepoint(text, pos);
        if (is_word_codepoint(cp)) {
            append_utf8(current, to_lower(cp));
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

}  // namespace lvmr
