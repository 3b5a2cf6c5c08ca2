#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include "geoparse/exporters.hpp"

using namespace geoparse;

namespace {

// re-parse oracle: throws on malformed XML
boost::property_tree::ptree parse_xml(const std::string& xml) {
    std::istringstream in(xml);
    boost::property_tree::ptree tree;
    boost::property_tree::read_xml(in, tree);
    return tree;
}

MentionOut mention(const std::string& place_id, const std::string& country, double lat, double lon,
                   int cls, double score, std::size_t start = 0) {
    MentionOut m;
    m.start = start;
    m.end = start + 5;
    m.surface = place_id + "-surface";
    m.place_id = place_id;
    m.country = country;
    m.lat = lat;
    m.lon = lon;
    m.importance_class = cls;
    m.score = score;
    m.method = "deep";
    return m;
}

TaggedRecord record(const std::string& id, std::vector<MentionOut> mentions) {
    TaggedRecord r;
    r.doc.id = id;
    r.doc.lang = "en";
    r.doc.text = "text";
    r.mentions = std::move(mentions);
    return r;
}

}  // namespace

TEST_CASE("georss places each document at its best mention") {
    const auto paris = mention("FR-PAR", "FR", 48.8566, 2.3522, 1, 80.0, 0);
    const auto texas = mention("US-TX-PAR", "US", 33.6609, -95.5555, 4, 120.0, 10);
    const GeoRssResult result = to_georss({record("doc-1", {paris, texas}), record("doc-2", {})});
    CHECK(result.skipped_documents == 1);

    const auto tree = parse_xml(result.xml);
    const auto& channel = tree.get_child("rss.channel");
    std::size_t items = 0;
    for (const auto& [key, item] : channel) {
        if (key != "item") continue;
        ++items;
        // argmax: the 120-score mention wins
        CHECK(item.get<std::string>("title") == "doc-1");
        CHECK(item.get<double>("geo:lat") == Catch::Approx(33.6609).margin(1e-6));
        CHECK(item.get<double>("geo:long") == Catch::Approx(-95.5555).margin(1e-6));
    }
    CHECK(items == 1);
    CHECK(result.xml.find("<geo:lat>33.660900</geo:lat>") != std::string::npos);
}

TEST_CASE("georss ties break to the earliest span") {
    const auto first = mention("A", "AA", 1.0, 2.0, 1, 80.0, 0);
    const auto second = mention("B", "BB", 3.0, 4.0, 1, 80.0, 10);
    const GeoRssResult result = to_georss({record("doc", {first, second})});
    CHECK(result.xml.find("<geo:lat>1.000000</geo:lat>") != std::string::npos);
}

TEST_CASE("kml folders, placemark class filter and icon buckets") {
    Story quake;
    quake.story_id = "quake";
    quake.title = "Earthquake near Tehran";
    quake.description = "Regional coverage";
    quake.link = "https://example.org/q";
    quake.article_count = 25;
    quake.mentions = {mention("IR-TEH", "IR", 35.6892, 51.3890, 1, 100.0),
                      mention("IR-AND", "IR", 38.0, 48.4, 5, 10.0)};
    Story minor;
    minor.story_id = "minor";
    minor.title = "Local piece";
    minor.article_count = 10;
    minor.mentions = {mention("FR-PAR", "FR", 48.8566, 2.3522, 1, 80.0),
                      mention("FR-BRE", "FR", 48.3904, -4.4861, 3, 30.0)};
    Story tiny;
    tiny.story_id = "tiny";
    tiny.article_count = 9;
    tiny.mentions = {mention("PL-WAW", "PL", 52.2297, 21.0122, 1, 80.0)};

    const std::string xml = to_kml({quake, minor, tiny});
    const auto tree = parse_xml(xml);

    std::size_t folders = 0, placemarks = 0;
    for (const auto& [key, node] : tree.get_child("kml.Document")) {
        if (key != "Folder") continue;
        ++folders;
        for (const auto& [inner_key, placemark] : node) {
            if (inner_key != "Placemark") continue;
            ++placemarks;
            CHECK(placemark.get<std::string>("Point.coordinates").find(',') != std::string::npos);
        }
    }
    CHECK(folders == 3);
    // class <= 3 only: quake keeps 1 of 2, minor keeps 2, tiny keeps 1
    CHECK(placemarks == 4);
    CHECK(xml.find("IR-AND") == std::string::npos);

    // icon buckets: >20 high, 10..20 medium, <10 low
    CHECK(xml.find("<name>Earthquake near Tehran</name>") != std::string::npos);
    CHECK(xml.find("#coverage-high") != std::string::npos);
    CHECK(xml.find("#coverage-medium") != std::string::npos);
    CHECK(xml.find("#coverage-low") != std::string::npos);
    CHECK(xml.find("https://example.org/q") != std::string::npos);

    CHECK(kml_style_for(25) == std::string("coverage-high"));
    CHECK(kml_style_for(21) == std::string("coverage-high"));
    CHECK(kml_style_for(20) == std::string("coverage-medium"));
    CHECK(kml_style_for(10) == std::string("coverage-medium"));
    CHECK(kml_style_for(9) == std::string("coverage-low"));
    CHECK(kml_style_for(1) == std::string("coverage-low"));
}

TEST_CASE("kml placemark count equals the class-filtered mention count", "[property]") {
    std::mt19937 rng(31);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Story> stories;
        std::size_t expected = 0;
        const int story_count = 1 + static_cast<int>(rng() % 4);
        for (int s = 0; s < story_count; ++s) {
            Story story;
            story.story_id = "s" + std::to_string(s);
            story.article_count = 1 + static_cast<int>(rng() % 30);
            const int mention_count = static_cast<int>(rng() % 6);
            for (int m = 0; m < mention_count; ++m) {
                const int cls = static_cast<int>(rng() % 7);
                story.mentions.push_back(mention("P" + std::to_string(m), "XX", 1.0, 2.0, cls, 10.0));
                if (cls <= 3) ++expected;
            }
            stories.push_back(std::move(story));
        }
        const std::string xml = to_kml(stories);
        std::size_t count = 0;
        for (std::size_t pos = xml.find("<Placemark>"); pos != std::string::npos;
             pos = xml.find("<Placemark>", pos + 1))
            ++count;
        CHECK(count == expected);
    }
}

TEST_CASE("xml special characters are escaped") {
    Story story;
    story.story_id = "s";
    story.title = "Fish & <Chips> \"quoted\"";
    story.article_count = 2;
    story.mentions = {mention("A", "AA", 1, 2, 1, 3)};
    const std::string xml = to_kml({story});
    CHECK(xml.find("Fish &amp; &lt;Chips&gt; &quot;quoted&quot;") != std::string::npos);
    CHECK_NOTHROW(parse_xml(xml));
}

TEST_CASE("geojson feature collection") {
    const auto docs = std::vector<TaggedRecord>{
        record("d1", {mention("FR-PAR", "FR", 48.8566, 2.3522, 1, 80.0),
                      mention("PL-WAW", "PL", 52.2297, 21.0122, 1, 80.0)}),
        record("d2", {mention("BY-BRE", "BY", 52.0976, 23.7341, 3, 47.2)})};
    const std::string text = to_geojson(docs);
    const auto parsed = nlohmann::json::parse(text);
    CHECK(parsed["type"] == "FeatureCollection");
    REQUIRE(parsed["features"].size() == 3);
    const auto& paris = parsed["features"][0];
    CHECK(paris["geometry"]["type"] == "Point");
    // GeoJSON convention: [lon, lat]
    CHECK(paris["geometry"]["coordinates"][0].get<double>() == Catch::Approx(2.3522).margin(1e-6));
    CHECK(paris["geometry"]["coordinates"][1].get<double>() == Catch::Approx(48.8566).margin(1e-6));
    CHECK(paris["properties"]["place_id"] == "FR-PAR");
    CHECK(paris["properties"]["doc_id"] == "d1");
    CHECK(paris["properties"]["span"][0] == 0);

    const std::string empty = to_geojson({});
    const auto empty_parsed = nlohmann::json::parse(empty);
    CHECK(empty_parsed["features"].empty());
}

TEST_CASE("emitters are deterministic byte for byte") {
    const auto docs = std::vector<TaggedRecord>{
        record("d1", {mention("FR-PAR", "FR", 48.8566, 2.3522, 1, 80.0)})};
    Story story;
    story.story_id = "s";
    story.article_count = 15;
    story.mentions = docs[0].mentions;
    CHECK(to_georss(docs).xml == to_georss(docs).xml);
    CHECK(to_kml({story}) == to_kml({story}));
    CHECK(to_geojson(docs) == to_geojson(docs));
    // trailing newline on every emitter
    CHECK(to_georss(docs).xml.back() == '\n');
    CHECK(to_kml({story}).back() == '\n');
    CHECK(to_geojson(docs).back() == '\n');
}

TEST_CASE("build_stories groups documents and applies sidecar metadata") {
    auto d1 = record("d1", {mention("A", "AA", 1, 2, 1, 3)});
    d1.doc.story_id = "quake";
    auto d2 = record("d2", {mention("B", "BB", 3, 4, 2, 5)});
    d2.doc.story_id = "quake";
    auto d3 = record("d3", {mention("C", "CC", 5, 6, 3, 7)});  // no story_id: own group

    Story meta;
    meta.story_id = "quake";
    meta.title = "The quake";
    meta.link = "https://example.org";
    meta.article_count = 25;

    const auto stories = build_stories({d1, d2, d3}, {meta});
    REQUIRE(stories.size() == 2);
    CHECK(stories[0].story_id == "quake");
    CHECK(stories[0].title == "The quake");
    CHECK(stories[0].article_count == 25);
    CHECK(stories[0].mentions.size() == 2);
    CHECK(stories[1].story_id == "d3");
    CHECK(stories[1].article_count == 1);

    // without sidecar metadata the group size drives the count
    const auto bare = build_stories({d1, d2, d3}, {});
    CHECK(bare[0].article_count == 2);
}
