#include <catch2/catch_amalgamated.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>

#include "geoparse/gazetteer.hpp"

using namespace geoparse;
namespace fs = std::filesystem;

namespace {

const std::string kDataDir = GEOPARSE_DATA_DIR;

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path path = fs::temp_directory_path() / ("geoparse_gaz_" + name);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << content;
    return path;
}

std::vector<PlaceEntry> toy_places() {
    return {
        {"FR-PAR", "Paris", "FR", 48.8566, 2.3522, 1, "gd"},
        {"US-TX-PAR", "Paris", "US", 33.6609, -95.5555, 4, "gd"},
        {"BY-BRE", "Brest", "BY", 52.0976, 23.7341, 3, "gd"},
        {"FR-BRE", "Brest", "FR", 48.3904, -4.4861, 3, "gd"},
        {"DE-MUC", "Munich", "DE", 48.1374, 11.5755, 2, "gd"},
        {"MC-MCO", "Monaco", "MC", 43.7384, 7.4246, 0, "ec"},
    };
}

}  // namespace

TEST_CASE("load_places maps well-formed rows") {
    const auto path = temp_file("places_ok.tsv",
                                "# comment\n"
                                "FR-PAR\tParis\tFR\t48.8566\t2.3522\t1\tgd\n"
                                "XX-7\tSeven\tXX\t1.0\t1.0\t7\tgd\n"
                                "BAD-LAT\tNope\tFR\t91.0\t0.0\t1\tgd\n"
                                "BAD-LON\tNope\tFR\t0.0\t-180.0\t1\tgd\n"
                                "SHORT\trow\n");
    const auto result = load_places(path.string());
    REQUIRE(result.rows.size() == 2);
    const PlaceEntry& paris = result.rows[0];
    CHECK(paris.place_id == "FR-PAR");
    CHECK(paris.canonical_name == "Paris");
    CHECK(paris.country == "FR");
    CHECK(paris.lat == Catch::Approx(48.8566));
    CHECK(paris.lon == Catch::Approx(2.3522));
    CHECK(paris.importance_class == 1);
    CHECK(paris.source == "gd");
    // class "7" clamps to 6 with a warning, row kept
    CHECK(result.rows[1].importance_class == 6);
    CHECK(result.rejected == 3);
    REQUIRE(result.issues.size() == 4);  // clamp warning + 3 rejections
    bool lat_reported = false;
    for (const RowIssue& issue : result.issues)
        if (issue.line == 4 && issue.message.find("latitude") != std::string::npos) lat_reported = true;
    CHECK(lat_reported);
}

TEST_CASE("load_places missing file is fatal") {
    CHECK_THROWS_AS(load_places("/nonexistent/places.tsv"), GazetteerError);
}

TEST_CASE("load_variants validates rows") {
    const auto path = temp_file("variants.tsv",
                                "FR-PAR\tParigi\tit\texonym\n"
                                "TR-IST\tConstantinople\t*\thistorical\n"
                                "FR-PAR\tX\tzz!\texonym\n"
                                "FR-PAR\tX\tit\tweird\n"
                                "FR-PAR\t \tit\texonym\n");
    const auto result = load_variants(path.string());
    REQUIRE(result.rows.size() == 2);
    CHECK(result.rows[0].lang == "it");
    CHECK(result.rows[1].kind == VariantKind::historical);
    CHECK(result.rejected == 3);
}

TEST_CASE("build rejects dangling variants, reports them") {
    std::vector<std::string> issues;
    const auto index = GazetteerIndex::build(toy_places(), {{"XX-999", "Nowhere", "en", VariantKind::exonym}},
                                             &issues);
    CHECK(index.lookup("nowhere", "en").empty());
    REQUIRE(issues.size() == 1);
    CHECK(issues[0].find("XX-999") != std::string::npos);
}

TEST_CASE("duplicate place_id is fatal and names both sources") {
    auto places = toy_places();
    places.push_back({"FR-PAR", "Paris encore", "FR", 48.0, 2.0, 2, "knab"});
    try {
        GazetteerIndex::build(std::move(places), {});
        FAIL("expected GazetteerError");
    } catch (const GazetteerError& e) {
        const std::string what = e.what();
        CHECK(what.find("FR-PAR") != std::string::npos);
        CHECK(what.find("gd") != std::string::npos);
        CHECK(what.find("knab") != std::string::npos);
    }
}

TEST_CASE("lookup honors language scoping") {
    const auto index = GazetteerIndex::build(toy_places(), {{"FR-PAR", "Parigi", "it", VariantKind::exonym},
                                                            {"DE-MUC", "Monaco", "it", VariantKind::exonym}});
    // canonical names answer for every language
    auto hits = index.lookup("paris", "en");
    REQUIRE(hits.size() == 2);
    CHECK(hits[0]->place_id == "FR-PAR");
    CHECK(hits[1]->place_id == "US-TX-PAR");

    // exonym visible only in its language
    REQUIRE(index.lookup("parigi", "it").size() == 1);
    CHECK(index.lookup("parigi", "it")[0]->place_id == "FR-PAR");
    CHECK(index.lookup("parigi", "en").empty());

    // the paper's Monaco example: Italian sees Munich and the country
    auto monaco = index.lookup("monaco", "it");
    REQUIRE(monaco.size() == 2);
    CHECK(monaco[0]->place_id == "DE-MUC");
    CHECK(monaco[1]->place_id == "MC-MCO");
    // other languages see only the country
    REQUIRE(index.lookup("monaco", "en").size() == 1);

    // two Brests under the wildcard query
    CHECK(index.lookup("brest", "*").size() == 2);
    CHECK(index.lookup("zzzz", "en").empty());
}

TEST_CASE("empty variant list answers canonical names only") {
    const auto index = GazetteerIndex::build(toy_places(), {});
    CHECK(index.lookup("paris", "en").size() == 2);
    CHECK(index.lookup("parigi", "it").empty());
}

TEST_CASE("every fixture variant resolves through lookup", "[property]") {
    auto places = load_places(kDataDir + "/places.tsv");
    auto variants = load_variants(kDataDir + "/variants.tsv");
    REQUIRE(places.rejected == 0);
    REQUIRE(variants.rejected == 0);
    const auto rows = variants.rows;
    const auto index = GazetteerIndex::build(std::move(places.rows), std::move(variants.rows));
    for (const NameVariant& variant : rows) {
        const auto hits = index.lookup(text::normalize_key(variant.name), variant.lang);
        bool found = false;
        for (const PlaceEntry* hit : hits) found = found || hit->place_id == variant.place_id;
        INFO(variant.name << " (" << variant.lang << ")");
        CHECK(found);
    }
    // deterministic: repeated lookups return equal sets
    CHECK(index.lookup("brest", "*") == index.lookup("brest", "*"));
}

TEST_CASE("merge is order independent") {
    auto a = toy_places();
    auto b = a;
    std::reverse(b.begin(), b.end());
    const auto ia = GazetteerIndex::build(std::move(a), {});
    const auto ib = GazetteerIndex::build(std::move(b), {});
    for (const std::string& key : ia.keys()) {
        const auto ha = ia.lookup(key, "*");
        const auto hb = ib.lookup(key, "*");
        REQUIRE(ha.size() == hb.size());
        for (std::size_t i = 0; i < ha.size(); ++i) CHECK(ha[i]->place_id == hb[i]->place_id);
    }
}

TEST_CASE("persist/restore round trip preserves lookups and checksum") {
    auto places = load_places(kDataDir + "/places.tsv");
    auto variants = load_variants(kDataDir + "/variants.tsv");
    const auto index = GazetteerIndex::build(std::move(places.rows), std::move(variants.rows));
    const fs::path path = fs::temp_directory_path() / "geoparse_roundtrip.gzix";
    index.persist(path.string());
    const auto restored = GazetteerIndex::restore(path.string());

    CHECK(restored.meta().checksum == index.meta().checksum);
    CHECK(restored.meta().place_count == index.meta().place_count);
    CHECK(restored.meta().variant_count == index.meta().variant_count);

    std::mt19937 rng(7);
    const auto keys = index.keys();
    for (int i = 0; i < 100; ++i) {
        const std::string& key = keys[rng() % keys.size()];
        const auto before = index.lookup(key, "*");
        const auto after = restored.lookup(key, "*");
        REQUIRE(before.size() == after.size());
        for (std::size_t k = 0; k < before.size(); ++k) CHECK(before[k]->place_id == after[k]->place_id);
    }
}

TEST_CASE("restore rejects corrupt files") {
    const auto index = GazetteerIndex::build(toy_places(), {});
    const fs::path path = fs::temp_directory_path() / "geoparse_corrupt.gzix";
    index.persist(path.string());

    std::string blob;
    {
        std::ifstream in(path, std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        blob = buf.str();
    }

    SECTION("truncated file") {
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << blob.substr(0, blob.size() / 2);
        out.close();
        CHECK_THROWS_WITH(GazetteerIndex::restore(path.string()),
                          Catch::Matchers::ContainsSubstring("truncated"));
    }
    SECTION("version bump") {
        blob[4] = 9;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << blob;
        out.close();
        CHECK_THROWS_WITH(GazetteerIndex::restore(path.string()),
                          Catch::Matchers::ContainsSubstring("version"));
    }
    SECTION("bad magic") {
        blob[0] = 'X';
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << blob;
        out.close();
        CHECK_THROWS_WITH(GazetteerIndex::restore(path.string()),
                          Catch::Matchers::ContainsSubstring("magic"));
    }
    SECTION("flipped payload byte fails the checksum") {
        blob[20] = static_cast<char>(blob[20] ^ 0x5A);
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        out << blob;
        out.close();
        CHECK_THROWS(GazetteerIndex::restore(path.string()));
    }
}
