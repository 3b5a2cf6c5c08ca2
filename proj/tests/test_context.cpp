#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <random>

#include "geoparse/context.hpp"

using namespace geoparse;

namespace {

const PlaceEntry kWarsaw{"PL-WAW", "Warsaw", "PL", 52.2297, 21.0122, 1, "gd"};
const PlaceEntry kMunich{"DE-MUC", "Munich", "DE", 48.1374, 11.5755, 2, "gd"};
const PlaceEntry kMonaco{"MC-MCO", "Monaco", "MC", 43.7384, 7.4246, 0, "ec"};
const PlaceEntry kBrestBy{"BY-BRE", "Brest", "BY", 52.0976, 23.7341, 3, "gd"};
const PlaceEntry kBrestFr{"FR-BRE", "Brest", "FR", 48.3904, -4.4861, 3, "gd"};
const PlaceEntry kLondonGb{"GB-LON", "London", "GB", 51.5072, -0.1276, 1, "gd"};
const PlaceEntry kLondonGb2{"GB-LO2", "London", "GB", 51.6, -0.2, 2, "gd"};

CandidateMention mention(std::initializer_list<const PlaceEntry*> candidates, std::size_t start = 0) {
    CandidateMention m;
    m.start = start;
    m.end = start + 1;
    m.surface = "x";
    m.lookup_key = "x";
    m.candidates = candidates;
    return m;
}

}  // namespace

TEST_CASE("shallow pass keeps unambiguous important names") {
    CHECK(shallow_parse({mention({&kWarsaw})}) == std::set<std::string>{"PL"});
    // Monaco in Italian: two countries, contributes nothing
    CHECK(shallow_parse({mention({&kMunich, &kMonaco})}).empty());
    // class 3 homographs are out regardless of country
    CHECK(shallow_parse({mention({&kBrestBy, &kBrestFr})}).empty());
    // several candidates in one country, all class <= 2: still usable
    CHECK(shallow_parse({mention({&kLondonGb, &kLondonGb2})}) == std::set<std::string>{"GB"});
    // a single class-3 candidate is too small for the shallow pass
    CHECK(shallow_parse({mention({&kBrestBy})}).empty());
}

TEST_CASE("assemble_context unions metadata and shallow countries") {
    const GeoContext zw = assemble_context(std::string("ZW"), {});
    CHECK(zw.contains("ZW"));
    CHECK(zw.countries.at("ZW") == GeoContext::from_metadata);

    const GeoContext shallow_only = assemble_context(std::nullopt, {"PL"});
    CHECK(shallow_only.contains("PL"));
    CHECK(shallow_only.countries.at("PL") == GeoContext::from_shallow);

    const GeoContext both = assemble_context(std::string("FR"), {"PL", "DE"});
    CHECK(both.countries.size() == 3);
    CHECK(both.contains("FR"));
    CHECK(both.contains("PL"));
    CHECK(both.contains("DE"));

    // same country from both sources keeps both provenance bits
    const GeoContext merged = assemble_context(std::string("PL"), {"PL"});
    CHECK(merged.countries.at("PL") == (GeoContext::from_metadata | GeoContext::from_shallow));
}

TEST_CASE("malformed source_country is ignored with a warning") {
    std::vector<std::string> warnings;
    const GeoContext context = assemble_context(std::string("Fra"), {"PL"}, &warnings);
    CHECK_FALSE(context.contains("Fra"));
    CHECK(context.contains("PL"));
    REQUIRE(warnings.size() == 1);
    CHECK(warnings[0].find("Fra") != std::string::npos);
    // lowercase codes are accepted and uppercased
    CHECK(assemble_context(std::string("fr"), {}).contains("FR"));
}

TEST_CASE("context is monotone and order independent", "[property]") {
    std::mt19937 rng(3);
    const std::vector<CandidateMention> pool = {
        mention({&kWarsaw}, 0),        mention({&kMunich, &kMonaco}, 2), mention({&kBrestBy, &kBrestFr}, 4),
        mention({&kLondonGb}, 6),      mention({&kMunich}, 8),           mention({&kMonaco}, 10),
        mention({&kBrestFr}, 12),
    };
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<CandidateMention> mentions;
        for (const auto& m : pool)
            if (rng() % 2) mentions.push_back(m);
        const auto base = shallow_parse(mentions);

        // adding an eligible mention never removes countries
        std::vector<CandidateMention> more = mentions;
        more.push_back(mention({&kWarsaw}, 20));
        const auto grown = shallow_parse(more);
        for (const std::string& c : base) CHECK(grown.count(c) == 1);
        CHECK(grown.count("PL") == 1);

        // order independence
        std::shuffle(mentions.begin(), mentions.end(), rng);
        CHECK(shallow_parse(mentions) == base);
    }
}
