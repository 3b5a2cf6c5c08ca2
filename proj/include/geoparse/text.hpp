#pragma once

// UTF-8 handling, Unicode NFC normalization, simple case folding and the
// character classification queries the matcher needs. Tables come from
// detail/unicode_data.hpp (generated, see tools/gen_unicode_tables.py).

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "geoparse/detail/unicode_data.hpp"

namespace geoparse::text {

inline constexpr char32_t kReplacementChar = 0xFFFD;

// Decodes the code point starting at text[pos]; advances pos past it.
// Malformed bytes decode to U+FFFD one byte at a time.
inline char32_t decode_utf8(std::string_view text, std::size_t& pos) {
    const auto byte = [&](std::size_t i) { return static_cast<unsigned char>(text[i]); };
    const unsigned char b0 = byte(pos);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
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
        ++pos;
        return kReplacementChar;
    }
    if (pos + len > text.size()) {
        ++pos;
        return kReplacementChar;
    }
    for (int i = 1; i < len; ++i) {
        const unsigned char b = byte(pos + i);
        if ((b & 0xC0) != 0x80) {
            ++pos;
            return kReplacementChar;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    // reject overlong forms and surrogates
    static constexpr char32_t kMin[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMin[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++pos;
        return kReplacementChar;
    }
    pos += len;
    return cp;
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

inline std::vector<char32_t> decode(std::string_view text) {
    std::vector<char32_t> cps;
    cps.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) cps.push_back(decode_utf8(text, pos));
    return cps;
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t cp : cps) append_utf8(out, cp);
    return out;
}

namespace detail_text {

template <std::size_t N>
inline bool in_ranges(const geoparse::detail::Range (&ranges)[N], char32_t cp) {
    auto it = std::upper_bound(std::begin(ranges), std::end(ranges), cp,
                               [](char32_t v, const geoparse::detail::Range& r) { return v < r.lo; });
    return it != std::begin(ranges) && cp <= std::prev(it)->hi;
}

}  // namespace detail_text

inline bool is_letter(char32_t cp) { return detail_text::in_ranges(geoparse::detail::kLetterRanges, cp); }
inline bool is_cased_letter(char32_t cp) { return detail_text::in_ranges(geoparse::detail::kCasedRanges, cp); }
inline bool is_uppercase(char32_t cp) { return detail_text::in_ranges(geoparse::detail::kUpperRanges, cp); }
inline bool is_mark(char32_t cp) { return detail_text::in_ranges(geoparse::detail::kMarkRanges, cp); }
inline bool is_digit(char32_t cp) { return detail_text::in_ranges(geoparse::detail::kDigitRanges, cp); }

inline bool is_space(char32_t cp) {
    switch (cp) {
        case 0x09: case 0x0A: case 0x0B: case 0x0C: case 0x0D: case 0x20:
        case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
        case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

inline char32_t simple_fold(char32_t cp) {
    const auto& table = geoparse::detail::kSimpleFold;
    auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                               [](const geoparse::detail::FoldPair& p, char32_t v) { return p.from < v; });
    if (it != std::end(table) && it->from == cp) return it->to;
    return cp;
}

inline std::uint8_t combining_class(char32_t cp) {
    const auto& table = geoparse::detail::kCombiningClasses;
    auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                               [](const geoparse::detail::CombiningClass& c, char32_t v) { return c.cp < v; });
    if (it != std::end(table) && it->cp == cp) return it->ccc;
    return 0;
}

namespace detail_text {

// Hangul syllable constants (decomposition/composition is algorithmic)
inline constexpr char32_t kHangulSBase = 0xAC00;
inline constexpr char32_t kHangulLBase = 0x1100;
inline constexpr char32_t kHangulVBase = 0x1161;
inline constexpr char32_t kHangulTBase = 0x11A7;
inline constexpr int kHangulVCount = 21, kHangulTCount = 28;
inline constexpr int kHangulNCount = kHangulVCount * kHangulTCount;
inline constexpr int kHangulSCount = 11172;

inline void decompose_cp(char32_t cp, std::vector<char32_t>& out) {
    if (cp >= kHangulSBase && cp < kHangulSBase + kHangulSCount) {
        const int index = static_cast<int>(cp - kHangulSBase);
        out.push_back(kHangulLBase + index / kHangulNCount);
        out.push_back(kHangulVBase + (index % kHangulNCount) / kHangulTCount);
        if (index % kHangulTCount) out.push_back(kHangulTBase + index % kHangulTCount);
        return;
    }
    const auto& table = geoparse::detail::kDecompositions;
    auto it = std::lower_bound(std::begin(table), std::end(table), cp,
                               [](const geoparse::detail::Decomposition& d, char32_t v) { return d.cp < v; });
    if (it != std::end(table) && it->cp == cp) {
        for (int i = 0; i < it->length; ++i)
            out.push_back(geoparse::detail::kDecompositionData[it->offset + i]);
        return;
    }
    out.push_back(cp);
}

inline char32_t compose_pair(char32_t a, char32_t b) {
    if (a >= kHangulLBase && a < kHangulLBase + 19 && b >= kHangulVBase && b < kHangulVBase + kHangulVCount)
        return kHangulSBase + ((a - kHangulLBase) * kHangulVCount + (b - kHangulVBase)) * kHangulTCount;
    if (a >= kHangulSBase && a < kHangulSBase + kHangulSCount && (a - kHangulSBase) % kHangulTCount == 0 &&
        b > kHangulTBase && b < kHangulTBase + kHangulTCount)
        return a + (b - kHangulTBase);
    const auto& table = geoparse::detail::kCompositions;
    auto it = std::lower_bound(std::begin(table), std::end(table), std::pair<char32_t, char32_t>{a, b},
                               [](const geoparse::detail::Composition& c, const std::pair<char32_t, char32_t>& v) {
                                   return c.first != v.first ? c.first < v.first : c.second < v.second;
                               });
    if (it != std::end(table) && it->first == a && it->second == b) return it->composed;
    return 0;
}

}  // namespace detail_text

inline std::vector<char32_t> nfd(const std::vector<char32_t>& cps) {
    std::vector<char32_t> out;
    out.reserve(cps.size());
    for (char32_t cp : cps) detail_text::decompose_cp(cp, out);
    // canonical ordering: stable-sort runs of nonzero combining class
    for (std::size_t i = 1; i < out.size(); ++i) {
        const std::uint8_t cc = combining_class(out[i]);
        if (cc == 0) continue;
        std::size_t j = i;
        while (j > 0) {
            const std::uint8_t prev = combining_class(out[j - 1]);
            if (prev == 0 || prev <= cc) break;
            std::swap(out[j - 1], out[j]);
            --j;
        }
    }
    return out;
}

inline std::vector<char32_t> nfc(const std::vector<char32_t>& cps) {
    const std::vector<char32_t> d = nfd(cps);
    std::vector<char32_t> out;
    out.reserve(d.size());
    std::ptrdiff_t starter = -1;
    for (char32_t cp : d) {
        if (starter >= 0) {
            const bool blocked = static_cast<std::size_t>(starter) + 1 < out.size() &&
                                 combining_class(out.back()) >= combining_class(cp);
            if (!blocked) {
                if (char32_t composed = detail_text::compose_pair(out[starter], cp)) {
                    out[starter] = composed;
                    continue;
                }
            }
        }
        out.push_back(cp);
        if (combining_class(cp) == 0) starter = static_cast<std::ptrdiff_t>(out.size()) - 1;
    }
    return out;
}

inline std::string nfc(std::string_view text) { return encode(nfc(decode(text))); }

inline std::string fold_case(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t pos = 0;
    while (pos < text.size()) append_utf8(out, simple_fold(decode_utf8(text, pos)));
    return out;
}

// Trims outer whitespace and collapses internal runs to a single U+0020.
inline std::string collapse_whitespace(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const char32_t cp = decode_utf8(text, pos);
        if (is_space(cp)) {
            if (!out.empty()) pending_space = true;
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        append_utf8(out, cp);
    }
    return out;
}

// NFC + simple case fold + whitespace collapse: the gazetteer lookup key.
inline std::string normalize_key(std::string_view name) {
    return collapse_whitespace(fold_case(nfc(name)));
}

// NFC + whitespace collapse, case preserved (cased-script exact form).
inline std::string normalize_cased(std::string_view name) {
    return collapse_whitespace(nfc(name));
}

}  // namespace geoparse::text
