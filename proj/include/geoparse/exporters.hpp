#pragma once

// Map-format emitters: GeoRSS point feeds, KML 2.0 story folders and
// GeoJSON. All emitters are pure; identical input yields byte-identical
// output (fixed element order, coordinates printed with 6 fractional
// digits).

#include <cmath>
#include <cstdio>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "geoparse/records.hpp"

namespace geoparse {

struct Story {
    std::string story_id;
    std::string title;
    std::string description;
    std::string link;
    int article_count = 1;
    std::vector<MentionOut> mentions;
};

namespace detail_export {

inline std::string escape_xml(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

inline std::string coord(double value) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", value);
    return buf;
}

inline const MentionOut* best_mention(const TaggedRecord& record) {
    const MentionOut* best = nullptr;
    for (const MentionOut& m : record.mentions)
        if (!best || m.score > best->score || (m.score == best->score && m.start < best->start)) best = &m;
    return best;
}

}  // namespace detail_export

struct GeoRssOptions {
    std::string title = "geoparse resolved places";
    std::string link = "";
    std::string description = "Documents with their highest-scoring resolved place";
};

struct GeoRssResult {
    std::string xml;
    std::size_t skipped_documents = 0;  // documents without a resolved mention
};

// RSS 2.0, one item per document located at its highest-scoring mention
// (ties go to the earliest span). Point coordinates are geo:lat/geo:long.
inline GeoRssResult to_georss(const std::vector<TaggedRecord>& records, const GeoRssOptions& options = {}) {
    using detail_export::coord;
    using detail_export::escape_xml;
    GeoRssResult result;
    std::string& xml = result.xml;
    xml += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    xml += "<rss version=\"2.0\" xmlns:geo=\"http://www.w3.org/2003/01/geo/wgs84_pos#\">\n";
    xml += "  <channel>\n";
    xml += "    <title>" + escape_xml(options.title) + "</title>\n";
    xml += "    <link>" + escape_xml(options.link) + "</link>\n";
    xml += "    <description>" + escape_xml(options.description) + "</description>\n";
    for (const TaggedRecord& record : records) {
        const MentionOut* best = detail_export::best_mention(record);
        if (!best) {
            ++result.skipped_documents;
            continue;
        }
        xml += "    <item>\n";
        xml += "      <title>" + escape_xml(record.doc.id) + "</title>\n";
        xml += "      <description>" + escape_xml(best->surface + " (" + best->place_id + ", " +
                                                  best->country + ")") + "</description>\n";
        xml += "      <geo:lat>" + coord(best->lat) + "</geo:lat>\n";
        xml += "      <geo:long>" + coord(best->lon) + "</geo:long>\n";
        xml += "    </item>\n";
    }
    xml += "  </channel>\n";
    xml += "</rss>\n";
    return result;
}

// Media-coverage icon bucket: more than 20 articles -> high, 10..20 ->
// medium, under 10 -> low.
inline const char* kml_style_for(int article_count) {
    if (article_count > 20) return "coverage-high";
    if (article_count >= 10) return "coverage-medium";
    return "coverage-low";
}

// KML 2.0: one folder per story, one placemark per mention of class <= 3
// (small places, classes 4 to 6, are left out).
inline std::string to_kml(const std::vector<Story>& stories) {
    using detail_export::coord;
    using detail_export::escape_xml;
    std::string xml;
    xml += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    xml += "<kml xmlns=\"http://earth.google.com/kml/2.0\">\n";
    xml += "<Document>\n";
    for (const char* bucket : {"high", "medium", "low"}) {
        xml += std::string("  <Style id=\"coverage-") + bucket + "\">\n";
        xml += std::string("    <IconStyle><Icon><href>icons/coverage-") + bucket +
               ".png</href></Icon></IconStyle>\n";
        xml += "  </Style>\n";
    }
    for (const Story& story : stories) {
        xml += "  <Folder>\n";
        xml += "    <name>" + escape_xml(story.title.empty() ? story.story_id : story.title) + "</name>\n";
        xml += "    <description>" + escape_xml(story.description) + "</description>\n";
        for (const MentionOut& m : story.mentions) {
            if (m.importance_class > 3) continue;
            xml += "    <Placemark>\n";
            xml += "      <name>" + escape_xml(m.surface) + "</name>\n";
            xml += "      <description>" +
                   escape_xml(m.place_id + " (" + m.country + ")" +
                              (story.link.empty() ? "" : " - " + story.link)) + "</description>\n";
            xml += std::string("      <styleUrl>#") + kml_style_for(story.article_count) + "</styleUrl>\n";
            xml += "      <Point><coordinates>" + coord(m.lon) + "," + coord(m.lat) +
                   "</coordinates></Point>\n";
            xml += "    </Placemark>\n";
        }
        xml += "  </Folder>\n";
    }
    xml += "</Document>\n";
    xml += "</kml>\n";
    return xml;
}

// GeoJSON FeatureCollection of Point features, coordinates [lon, lat].
inline std::string to_geojson(const std::vector<TaggedRecord>& records) {
    using ordered_json = nlohmann::ordered_json;
    const auto round6 = [](double v) { return std::round(v * 1e6) / 1e6; };
    ordered_json features = ordered_json::array();
    for (const TaggedRecord& record : records) {
        for (const MentionOut& m : record.mentions) {
            ordered_json feature;
            feature["type"] = "Feature";
            feature["geometry"]["type"] = "Point";
            feature["geometry"]["coordinates"] = {round6(m.lon), round6(m.lat)};
            feature["properties"]["surface"] = m.surface;
            feature["properties"]["place_id"] = m.place_id;
            feature["properties"]["country"] = m.country;
            feature["properties"]["class"] = m.importance_class;
            feature["properties"]["score"] = m.score;
            feature["properties"]["doc_id"] = record.doc.id;
            feature["properties"]["span"] = {m.start, m.end};
            features.push_back(std::move(feature));
        }
    }
    ordered_json collection;
    collection["type"] = "FeatureCollection";
    collection["features"] = std::move(features);
    return collection.dump() + "\n";
}

// Groups tagged documents into stories. Metadata (title, description,
// link, article_count) comes from the optional sidecar records; fallbacks
// are the story id and the document group's own data.
inline std::vector<Story> build_stories(const std::vector<TaggedRecord>& records,
                                        const std::vector<Story>& metadata = {}) {
    std::vector<Story> stories;
    const auto find_meta = [&](const std::string& story_id) -> const Story* {
        for (const Story& meta : metadata)
            if (meta.story_id == story_id) return &meta;
        return nullptr;
    };
    const auto find_story = [&](const std::string& story_id) -> Story* {
        for (Story& story : stories)
            if (story.story_id == story_id) return &story;
        return nullptr;
    };
    for (const TaggedRecord& record : records) {
        const std::string story_id = record.doc.story_id.value_or(record.doc.id);
        Story* story = find_story(story_id);
        if (!story) {
            Story fresh;
            fresh.story_id = story_id;
            if (const Story* meta = find_meta(story_id)) {
                fresh.title = meta->title;
                fresh.description = meta->description;
                fresh.link = meta->link;
                fresh.article_count = meta->article_count;
            } else {
                fresh.title = story_id;
                fresh.article_count = 0;
            }
            stories.push_back(std::move(fresh));
            story = &stories.back();
        }
        if (!find_meta(story_id)) {
            // without sidecar metadata the coverage is the article count
            // carried by the documents, else the size of the group
            story->article_count += record.doc.article_count.value_or(1);
        }
        for (const MentionOut& m : record.mentions) story->mentions.push_back(m);
    }
    return stories;
}

// stories.jsonl sidecar: {story_id, title?, description?, link?, article_count?}
inline std::vector<Story> load_story_metadata(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw SchemaError("cannot open stories file: " + path);
    std::vector<Story> stories;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto obj = detail_records::parse_line(line, path, line_no);
        Story story;
        story.story_id = detail_records::require_string(obj, "story_id", path, line_no);
        story.title = obj.value("title", "");
        story.description = obj.value("description", "");
        story.link = obj.value("link", "");
        story.article_count = obj.value("article_count", 1);
        if (story.article_count < 1)
            throw SchemaError(path + ":" + std::to_string(line_no) + ": article_count must be positive");
        stories.push_back(std::move(story));
    }
    return stories;
}

}  // namespace geoparse
