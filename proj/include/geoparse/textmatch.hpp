#pragma once

// Tokenization and gazetteer matching. scan() walks the token stream,
// tries spans longest-first (leftmost-longest, non-overlapping) and, for
// single tokens that miss, falls back to morphological rule substitutions
// (declensions, inhabitant names).

#include <cstddef>
#include <fstream>
#include <optional>
#include <regex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "geoparse/gazetteer.hpp"
#include "geoparse/text.hpp"

namespace geoparse {

struct Token {
    std::string surface;
    std::size_t start = 0;  // byte offsets into the document
    std::size_t end = 0;
    bool starts_uppercase = false;
    bool script_cased = false;  // token carries at least one cased letter
};

// Word characters are letters, digits and combining marks; apostrophes and
// hyphens join when flanked by word characters ("L'Aquila", "Saint-Cyr").
inline std::vector<Token> tokenize(std::string_view text, std::string_view lang = {}) {
    (void)lang;  // segmentation is script-driven, not language-driven
    const auto is_word = [](char32_t cp) {
        return text::is_letter(cp) || text::is_digit(cp) || text::is_mark(cp);
    };
    const auto is_joiner = [](char32_t cp) { return cp == U'\'' || cp == U'’' || cp == U'-'; };

    std::vector<Token> tokens;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t cp_start = pos;
        char32_t cp = text::decode_utf8(text, pos);
        if (!is_word(cp)) continue;

        Token token;
        token.start = cp_start;
        token.starts_uppercase = text::is_uppercase(cp);
        token.script_cased = text::is_cased_letter(cp);
        std::size_t end = pos;
        while (pos < text.size()) {
            std::size_t next_start = pos;
            cp = text::decode_utf8(text, pos);
            if (is_word(cp)) {
                token.script_cased = token.script_cased || text::is_cased_letter(cp);
                end = pos;
                continue;
            }
            if (is_joiner(cp) && pos < text.size()) {
                std::size_t after = pos;
                const char32_t next = text::decode_utf8(text, after);
                if (is_word(next)) {
                    token.script_cased = token.script_cased || text::is_cased_letter(next);
                    end = after;
                    pos = after;
                    continue;
                }
            }
            pos = next_start;
            break;
        }
        token.end = end;
        token.surface = std::string(text.substr(token.start, token.end - token.start));
        tokens.push_back(std::move(token));
    }
    return tokens;
}

struct MorphRule {
    std::string lang;         // ISO-639-1 or "*"
    std::string pattern;      // ECMAScript regex applied to the normalized key
    std::string replacement;  // may use $1..$9
    std::string note;
    std::regex compiled;
};

// rules.tsv: lang \t pattern \t replacement \t note ('#' comments)
inline LoadResult<MorphRule> load_rules(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw GazetteerError("cannot open rules file: " + path);
    LoadResult<MorphRule> result;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        const auto fields = detail_gaz::split_tabs(line);
        if (fields.size() != 4) {
            result.issues.push_back({line_no, "expected 4 tab-separated fields, got " +
                                              std::to_string(fields.size())});
            ++result.rejected;
            continue;
        }
        MorphRule rule;
        rule.lang = std::string(fields[0]);
        rule.pattern = std::string(fields[1]);
        rule.replacement = std::string(fields[2]);
        rule.note = std::string(fields[3]);
        if (!detail_gaz::valid_lang(rule.lang)) {
            result.issues.push_back({line_no, "invalid language code '" + rule.lang + "'"});
            ++result.rejected;
            continue;
        }
        if (rule.pattern.empty()) {
            result.issues.push_back({line_no, "empty pattern"});
            ++result.rejected;
            continue;
        }
        try {
            rule.compiled = std::regex(rule.pattern);
        } catch (const std::regex_error& e) {
            result.issues.push_back({line_no, "pattern does not compile: " + std::string(e.what())});
            ++result.rejected;
            continue;
        }
        result.rows.push_back(std::move(rule));
    }
    return result;
}

struct CandidateKey {
    std::string key;
    std::optional<std::size_t> rule_index;  // nullopt = direct form
};

// The token's own normalized form first, then each applicable rule's
// substitution, duplicates removed preserving order. Substitutions that
// leave the key unchanged or empty are dropped.
inline std::vector<CandidateKey> candidate_keys(const Token& token, std::string_view lang,
                                                const std::vector<MorphRule>& rules) {
    std::vector<CandidateKey> keys;
    const std::string direct = text::normalize_key(token.surface);
    if (direct.empty()) return keys;
    keys.push_back({direct, std::nullopt});
    for (std::size_t i = 0; i < rules.size(); ++i) {
        const MorphRule& rule = rules[i];
        if (rule.lang != "*" && rule.lang != lang) continue;
        if (!std::regex_search(direct, rule.compiled)) continue;
        std::string substituted = std::regex_replace(direct, rule.compiled, rule.replacement);
        if (substituted.empty() || substituted == direct) continue;
        bool duplicate = false;
        for (const CandidateKey& k : keys) duplicate = duplicate || k.key == substituted;
        if (!duplicate) keys.push_back({std::move(substituted), i});
    }
    return keys;
}

struct CandidateMention {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;
    std::string lookup_key;
    std::vector<const PlaceEntry*> candidates;  // non-empty, sorted by place_id
    std::optional<std::size_t> morph_rule;      // index into the rule table, nullopt = direct
};

struct ScanOptions {
    std::size_t max_span_tokens = 4;
};

namespace detail_match {

inline bool whitespace_only(std::string_view text, std::size_t from, std::size_t to) {
    std::size_t pos = from;
    while (pos < to)
        if (!text::is_space(text::decode_utf8(text, pos))) return false;
    return true;
}

}  // namespace detail_match

inline std::vector<CandidateMention> scan(std::string_view doc_text, std::string_view lang,
                                          const GazetteerIndex& index,
                                          const std::vector<MorphRule>& rules,
                                          const ScanOptions& options = {}) {
    const std::vector<Token> tokens = tokenize(doc_text, lang);
    std::vector<CandidateMention> mentions;
    std::size_t i = 0;
    while (i < tokens.size()) {
        // cased scripts: spans start at uppercase tokens only
        if (tokens[i].script_cased && !tokens[i].starts_uppercase) {
            ++i;
            continue;
        }
        std::size_t max_len = std::min(options.max_span_tokens, tokens.size() - i);
        // multiword spans must be whitespace-contiguous
        std::size_t contiguous = 1;
        while (contiguous < max_len &&
               detail_match::whitespace_only(doc_text, tokens[i + contiguous - 1].end,
                                             tokens[i + contiguous].start))
            ++contiguous;

        bool matched = false;
        for (std::size_t len = contiguous; len > 0 && !matched; --len) {
            const std::size_t span_start = tokens[i].start;
            const std::size_t span_end = tokens[i + len - 1].end;
            const std::string key =
                text::normalize_key(doc_text.substr(span_start, span_end - span_start));
            auto emit = [&](std::string lookup_key, std::vector<const PlaceEntry*> candidates,
                            std::optional<std::size_t> rule_index) {
                CandidateMention mention;
                mention.start = span_start;
                mention.end = span_end;
                mention.surface = std::string(doc_text.substr(span_start, span_end - span_start));
                mention.lookup_key = std::move(lookup_key);
                mention.candidates = std::move(candidates);
                mention.morph_rule = rule_index;
                mentions.push_back(std::move(mention));
                i += len;
                matched = true;
            };
            auto candidates = index.lookup(key, lang);
            if (!candidates.empty()) {
                emit(key, std::move(candidates), std::nullopt);
                break;
            }
            if (len == 1) {
                for (const CandidateKey& ck : candidate_keys(tokens[i], lang, rules)) {
                    if (!ck.rule_index) continue;  // direct form already missed
                    auto rule_candidates = index.lookup(ck.key, lang);
                    if (!rule_candidates.empty()) {
                        emit(ck.key, std::move(rule_candidates), ck.rule_index);
                        break;
                    }
                }
            }
        }
        if (!matched) ++i;
    }
    return mentions;
}

}  // namespace geoparse
