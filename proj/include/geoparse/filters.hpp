#pragma once

// Binary filters over candidate mentions: person-name collisions and
// geo-stop words. Also the stop-word builders that propose entries from a
// reference corpus or a first-name list; proposals only become stop words
// once accepted.

#include <cstddef>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "geoparse/textmatch.hpp"

namespace geoparse {

class FilterError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PersonLexicon {
public:
    // persons.txt: one full name per line, '#' comments
    static PersonLexicon load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FilterError("cannot open persons file: " + path);
        PersonLexicon lexicon;
        std::string line;
        while (std::getline(in, line)) {
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            lexicon.add(line);
        }
        return lexicon;
    }

    void add(std::string_view full_name) {
        std::vector<std::string> parts;
        for (const Token& token : tokenize(full_name))
            parts.push_back(text::normalize_cased(token.surface));
        if (!parts.empty()) names_.push_back(std::move(parts));
    }

    const std::vector<std::vector<std::string>>& names() const { return names_; }
    bool empty() const { return names_.empty(); }

private:
    std::vector<std::vector<std::string>> names_;  // case-preserving token sequences
};

struct PersonSpan {
    std::size_t start = 0;
    std::size_t end = 0;
};

struct PersonMatches {
    std::vector<PersonSpan> spans;
    std::set<std::string> name_parts;  // every token of every matched occurrence
};

// Exact token-sequence matches of lexicon entries (case-sensitive; tokens
// compared on their NFC forms). Multiword entries must be
// whitespace-contiguous in the text.
inline PersonMatches match_persons(std::string_view doc_text, const std::vector<Token>& tokens,
                                   const PersonLexicon& lexicon) {
    PersonMatches matches;
    if (lexicon.empty() || tokens.empty()) return matches;

    std::unordered_map<std::string, std::vector<const std::vector<std::string>*>> by_first;
    for (const auto& name : lexicon.names()) by_first[name.front()].push_back(&name);

    std::vector<std::string> cased(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) cased[i] = text::normalize_cased(tokens[i].surface);

    for (std::size_t i = 0; i < tokens.size(); ++i) {
        const auto it = by_first.find(cased[i]);
        if (it == by_first.end()) continue;
        for (const auto* name : it->second) {
            const std::size_t len = name->size();
            if (i + len > tokens.size()) continue;
            bool ok = true;
            for (std::size_t k = 1; ok && k < len; ++k) {
                ok = cased[i + k] == (*name)[k] &&
                     detail_match::whitespace_only(doc_text, tokens[i + k - 1].end, tokens[i + k].start);
            }
            if (!ok) continue;
            matches.spans.push_back({tokens[i].start, tokens[i + len - 1].end});
            for (std::size_t k = 0; k < len; ++k) matches.name_parts.insert(cased[i + k]);
        }
    }
    return matches;
}

// Drops mentions overlapping a person span or whose surface equals a name
// part (case-sensitive). Pure subtraction: output is a subset of input.
inline std::vector<CandidateMention> filter_persons(const std::vector<CandidateMention>& mentions,
                                                    const PersonMatches& matches) {
    std::vector<CandidateMention> kept;
    kept.reserve(mentions.size());
    for (const CandidateMention& mention : mentions) {
        bool drop = false;
        for (const PersonSpan& span : matches.spans)
            drop = drop || (mention.start < span.end && span.start < mention.end);
        if (!drop && matches.name_parts.count(text::normalize_cased(mention.surface))) drop = true;
        if (!drop) kept.push_back(mention);
    }
    return kept;
}

struct StopEntry {
    std::string name;  // normalize_key form
    std::string lang;  // ISO-639-1 or "*"
    std::string provenance;  // firstname | corpus | manual
};

class StopList {
public:
    StopList() = default;

    // stoplist.tsv: name \t lang \t provenance
    static StopList load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw FilterError("cannot open stoplist file: " + path);
        StopList list;
        std::string line;
        std::size_t line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty() || line[0] == '#') continue;
            const auto fields = detail_gaz::split_tabs(line);
            if (fields.size() != 3 || fields[0].empty())
                throw FilterError(path + ":" + std::to_string(line_no) + ": expected name\\tlang\\tprovenance");
            if (!detail_gaz::valid_lang(fields[1]))
                throw FilterError(path + ":" + std::to_string(line_no) + ": invalid language code '" +
                                  std::string(fields[1]) + "'");
            list.add({text::normalize_key(fields[0]), std::string(fields[1]), std::string(fields[2])});
        }
        return list;
    }

    void add(StopEntry entry) {
        if (keys_.insert({entry.name, entry.lang}).second) entries_.push_back(std::move(entry));
    }

    bool contains(std::string_view key, std::string_view lang) const {
        return keys_.count({std::string(key), std::string(lang)}) > 0 ||
               keys_.count({std::string(key), "*"}) > 0;
    }

    const std::vector<StopEntry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    std::set<std::pair<std::string, std::string>> keys_;  // (name, lang), unique
    std::vector<StopEntry> entries_;
};

inline std::vector<CandidateMention> filter_stopwords(const std::vector<CandidateMention>& mentions,
                                                      const StopList& stoplist, std::string_view lang) {
    std::vector<CandidateMention> kept;
    kept.reserve(mentions.size());
    for (const CandidateMention& mention : mentions)
        if (!stoplist.contains(mention.lookup_key, lang)) kept.push_back(mention);
    return kept;
}

struct StopProposal {
    std::string name;  // normalize_key form
    std::string lang = "*";
    double frequency_per_million = 0.0;  // corpus evidence; 0 for first-name proposals
    std::string source;                  // corpus | firstname
    bool accepted = false;
};

// Gazetteer names whose lowercase form reaches |threshold_per_million| in
// the corpus (an occurrence counts when the token carries no uppercase
// letter). Throws on a corpus with no tokens.
inline std::vector<StopProposal> build_stoplist_from_corpus(const std::string& corpus_path,
                                                            const GazetteerIndex& index,
                                                            double threshold_per_million,
                                                            std::string_view lang = "*") {
    if (threshold_per_million <= 0.0) throw FilterError("threshold must be positive");
    std::ifstream in(corpus_path, std::ios::binary);
    if (!in) throw FilterError("cannot open corpus file: " + corpus_path);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string corpus = buf.str();

    std::unordered_map<std::string, std::size_t> lowercase_counts;
    std::size_t total_tokens = 0;
    for (const Token& token : tokenize(corpus)) {
        ++total_tokens;
        bool has_upper = false;
        std::size_t pos = 0;
        const std::string_view surface = token.surface;
        while (pos < surface.size())
            if (text::is_uppercase(text::decode_utf8(surface, pos))) has_upper = true;
        if (!has_upper) ++lowercase_counts[text::normalize_key(surface)];
    }
    if (total_tokens == 0) throw FilterError("corpus has no tokens: " + corpus_path);

    std::vector<StopProposal> proposals;
    for (const std::string& key : index.keys()) {
        const auto it = lowercase_counts.find(key);
        if (it == lowercase_counts.end()) continue;
        const double per_million = static_cast<double>(it->second) * 1e6 / static_cast<double>(total_tokens);
        if (per_million >= threshold_per_million)
            proposals.push_back({key, std::string(lang), per_million, "corpus", false});
    }
    return proposals;
}

// First names that are also gazetteer keys.
inline std::vector<StopProposal> build_stoplist_from_firstnames(const std::vector<std::string>& firstnames,
                                                                const GazetteerIndex& index) {
    std::vector<StopProposal> proposals;
    std::set<std::string> seen;
    for (const std::string& name : firstnames) {
        const std::string key = text::normalize_key(name);
        if (key.empty() || !seen.insert(key).second) continue;
        if (!index.lookup(key, "*").empty()) proposals.push_back({key, "*", 0.0, "firstname", false});
    }
    return proposals;
}

inline std::vector<std::string> load_firstnames(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FilterError("cannot open firstnames file: " + path);
    std::vector<std::string> names;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        names.push_back(line);
    }
    return names;
}

// Only accepted proposals become stop entries.
inline StopList to_stoplist(const std::vector<StopProposal>& proposals) {
    StopList list;
    for (const StopProposal& p : proposals)
        if (p.accepted) list.add({p.name, p.lang, p.source});
    return list;
}

}  // namespace geoparse
