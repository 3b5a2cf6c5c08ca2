#pragma once

// JSONL record schemas: input documents, tagged output and gold
// annotations. One JSON object per line; parse errors name the line.

#include <fstream>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

#include "geoparse/evalkit.hpp"

namespace geoparse {

class SchemaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct DocumentRecord {
    std::string id;
    std::string lang;  // ISO-639-1
    std::string text;
    std::optional<std::string> source_country;
    std::optional<std::string> story_id;
    std::optional<int> article_count;
};

struct MentionOut {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string surface;
    std::string place_id;
    std::string country;
    double lat = 0.0;
    double lon = 0.0;
    int importance_class = 6;
    double score = 0.0;
    std::string method;  // shallow | deep
};

struct TaggedRecord {
    DocumentRecord doc;
    std::vector<MentionOut> mentions;  // sorted by start
};

namespace detail_records {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

inline json parse_line(const std::string& line, const std::string& what, std::size_t line_no) {
    json parsed = json::parse(line, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object())
        throw SchemaError(what + ":" + std::to_string(line_no) + ": not a JSON object");
    return parsed;
}

inline std::string require_string(const json& obj, const char* key, const std::string& what,
                                  std::size_t line_no) {
    if (!obj.contains(key) || !obj[key].is_string())
        throw SchemaError(what + ":" + std::to_string(line_no) + ": missing string field '" + key + "'");
    return obj[key].get<std::string>();
}

inline std::size_t require_offset(const json& obj, const char* key, const std::string& what,
                                  std::size_t line_no) {
    if (!obj.contains(key) || !obj[key].is_number_unsigned())
        throw SchemaError(what + ":" + std::to_string(line_no) + ": missing non-negative field '" + key + "'");
    return obj[key].get<std::size_t>();
}

}  // namespace detail_records

inline DocumentRecord parse_document(const std::string& line, std::size_t line_no,
                                     const std::string& what = "documents") {
    using detail_records::require_string;
    const auto obj = detail_records::parse_line(line, what, line_no);
    DocumentRecord doc;
    doc.id = require_string(obj, "id", what, line_no);
    doc.lang = require_string(obj, "lang", what, line_no);
    doc.text = require_string(obj, "text", what, line_no);
    if (obj.contains("source_country")) doc.source_country = require_string(obj, "source_country", what, line_no);
    if (obj.contains("story_id")) doc.story_id = require_string(obj, "story_id", what, line_no);
    if (obj.contains("article_count")) {
        if (!obj["article_count"].is_number_integer() || obj["article_count"].get<int>() < 1)
            throw SchemaError(what + ":" + std::to_string(line_no) + ": article_count must be a positive integer");
        doc.article_count = obj["article_count"].get<int>();
    }
    return doc;
}

// Reads a whole documents file; duplicate ids are a schema error.
inline std::vector<DocumentRecord> load_documents(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open documents file: " + path);
    std::vector<DocumentRecord> docs;
    std::set<std::string> ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        DocumentRecord doc = parse_document(line, line_no, path);
        if (!ids.insert(doc.id).second)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": duplicate document id '" + doc.id + "'");
        docs.push_back(std::move(doc));
    }
    return docs;
}

inline nlohmann::ordered_json to_json(const TaggedRecord& record) {
    nlohmann::ordered_json out;
    out["id"] = record.doc.id;
    out["lang"] = record.doc.lang;
    out["text"] = record.doc.text;
    if (record.doc.source_country) out["source_country"] = *record.doc.source_country;
    if (record.doc.story_id) out["story_id"] = *record.doc.story_id;
    if (record.doc.article_count) out["article_count"] = *record.doc.article_count;
    out["mentions"] = nlohmann::ordered_json::array();
    for (const MentionOut& m : record.mentions) {
        nlohmann::ordered_json jm;
        jm["start"] = m.start;
        jm["end"] = m.end;
        jm["surface"] = m.surface;
        jm["place_id"] = m.place_id;
        jm["country"] = m.country;
        jm["lat"] = m.lat;
        jm["lon"] = m.lon;
        jm["class"] = m.importance_class;
        jm["score"] = m.score;
        jm["method"] = m.method;
        out["mentions"].push_back(std::move(jm));
    }
    return out;
}

inline TaggedRecord parse_tagged(const std::string& line, std::size_t line_no,
                                 const std::string& what = "tagged") {
    using detail_records::require_offset;
    using detail_records::require_string;
    const auto obj = detail_records::parse_line(line, what, line_no);
    TaggedRecord record;
    record.doc.id = require_string(obj, "id", what, line_no);
    record.doc.lang = require_string(obj, "lang", what, line_no);
    if (obj.contains("text")) record.doc.text = obj["text"].get<std::string>();
    if (obj.contains("source_country")) record.doc.source_country = obj["source_country"].get<std::string>();
    if (obj.contains("story_id")) record.doc.story_id = obj["story_id"].get<std::string>();
    if (obj.contains("article_count")) record.doc.article_count = obj["article_count"].get<int>();
    if (!obj.contains("mentions") || !obj["mentions"].is_array())
        throw SchemaError(what + ":" + std::to_string(line_no) + ": missing 'mentions' array");
    for (const auto& jm : obj["mentions"]) {
        MentionOut m;
        m.start = require_offset(jm, "start", what, line_no);
        m.end = require_offset(jm, "end", what, line_no);
        m.surface = require_string(jm, "surface", what, line_no);
        m.place_id = require_string(jm, "place_id", what, line_no);
        m.country = require_string(jm, "country", what, line_no);
        m.lat = jm.value("lat", 0.0);
        m.lon = jm.value("lon", 0.0);
        m.importance_class = jm.value("class", 6);
        m.score = jm.value("score", 0.0);
        m.method = jm.value("method", "deep");
        record.mentions.push_back(std::move(m));
    }
    return record;
}

inline std::vector<TaggedRecord> load_tagged(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open tagged file: " + path);
    std::vector<TaggedRecord> records;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        records.push_back(parse_tagged(line, line_no, path));
    }
    return records;
}

// gold.jsonl: {doc_id, start, end, place_id?, country?, lat?, lon?, lang?}
inline std::vector<GoldAnnotation> load_gold(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open gold file: " + path);
    std::vector<GoldAnnotation> gold;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto obj = detail_records::parse_line(line, path, line_no);
        GoldAnnotation g;
        g.doc_id = detail_records::require_string(obj, "doc_id", path, line_no);
        g.start = detail_records::require_offset(obj, "start", path, line_no);
        g.end = detail_records::require_offset(obj, "end", path, line_no);
        if (g.start >= g.end)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": empty or inverted span");
        if (obj.contains("place_id")) g.place_id = obj["place_id"].get<std::string>();
        if (obj.contains("country")) g.country = obj["country"].get<std::string>();
        if (obj.contains("lat")) g.lat = obj["lat"].get<double>();
        if (obj.contains("lon")) g.lon = obj["lon"].get<double>();
        if (obj.contains("lang")) g.lang = obj["lang"].get<std::string>();
        gold.push_back(std::move(g));
    }
    return gold;
}

inline std::vector<PredictedMention> predictions_from(const std::vector<TaggedRecord>& records) {
    std::vector<PredictedMention> out;
    for (const TaggedRecord& record : records)
        for (const MentionOut& m : record.mentions)
            out.push_back({record.doc.id, record.doc.lang, m.start, m.end, m.place_id, m.country});
    return out;
}

}  // namespace geoparse
