#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "geoparse/pipeline.hpp"

using namespace geoparse;

namespace {

const std::string kDataDir = GEOPARSE_DATA_DIR;

struct Fixture {
    GazetteerIndex index;
    std::vector<MorphRule> rules;
    PersonLexicon persons;
    StopList stoplist;
    std::vector<DocumentRecord> docs;
    std::vector<GoldAnnotation> gold;
};

const Fixture& fixture() {
    static const Fixture f = [] {
        Fixture out;
        auto places = load_places(kDataDir + "/places.tsv");
        auto variants = load_variants(kDataDir + "/variants.tsv");
        REQUIRE(places.rejected == 0);
        REQUIRE(variants.rejected == 0);
        out.index = GazetteerIndex::build(std::move(places.rows), std::move(variants.rows));
        auto rules = load_rules(kDataDir + "/rules.tsv");
        REQUIRE(rules.rejected == 0);
        out.rules = std::move(rules.rows);
        out.persons = PersonLexicon::load(kDataDir + "/persons.txt");
        out.stoplist = StopList::load(kDataDir + "/stoplist.tsv");
        out.docs = load_documents(kDataDir + "/docs.jsonl");
        out.gold = load_gold(kDataDir + "/gold.jsonl");
        return out;
    }();
    return f;
}

GeoTagger make_tagger(TaggerConfig config = {}) {
    const Fixture& f = fixture();
    return GeoTagger(f.index, f.rules, f.persons, f.stoplist, std::move(config));
}

const DocumentRecord& doc_by_id(const std::string& id) {
    for (const DocumentRecord& doc : fixture().docs)
        if (doc.id == id) return doc;
    FAIL("no such fixture document: " << id);
    static DocumentRecord unreachable;
    return unreachable;
}

std::vector<std::string> place_ids(const TaggedRecord& record) {
    std::vector<std::string> ids;
    for (const MentionOut& m : record.mentions) ids.push_back(m.place_id);
    return ids;
}

}  // namespace

TEST_CASE("warsaw-brest document resolves through the distance clue") {
    const auto tagger = make_tagger();
    const TaggedRecord tagged = tagger.tag(doc_by_id("en-001"));
    REQUIRE(tagged.mentions.size() == 2);
    CHECK(tagged.mentions[0].place_id == "PL-WAW");
    CHECK(tagged.mentions[0].method == "shallow");
    CHECK(tagged.mentions[1].place_id == "BY-BRE");
    CHECK(tagged.mentions[1].method == "deep");
    CHECK(tagged.mentions[1].score == Catch::Approx(47.16795635400807).margin(1e-9));
    // mentions sorted by start with valid spans
    for (const MentionOut& m : tagged.mentions) {
        CHECK(m.start < m.end);
        CHECK(m.end <= tagged.doc.text.size());
        CHECK(tagged.doc.text.substr(m.start, m.end - m.start) == m.surface);
    }
}

TEST_CASE("disabling km-distance flips the brest resolution to a tie") {
    TaggerConfig config;
    disable_heuristic(config.toggles, "km-distance");
    const auto resolution = make_tagger(config).resolve_document(doc_by_id("en-001"));
    REQUIRE(resolution.resolved.size() == 2);
    const ResolvedMention& brest = resolution.resolved[1];
    CHECK(brest.tie_break_used);
    REQUIRE(brest.trace.size() == 2);
    CHECK(brest.trace[0].total() == brest.trace[1].total());
}

TEST_CASE("person filter removes table-1 style collisions") {
    const auto tagger = make_tagger();
    const TaggedRecord tagged = tagger.tag(doc_by_id("en-002"));
    CHECK(place_ids(tagged) == std::vector<std::string>{"ES-MAD"});
    // with the filter disabled the two person-name cities surface
    TaggerConfig config;
    disable_heuristic(config.toggles, "person-filter");
    const TaggedRecord unfiltered = make_tagger(config).tag(doc_by_id("en-002"));
    CHECK(unfiltered.mentions.size() == 3);
}

TEST_CASE("standalone name parts are dropped document-wide") {
    const auto tagger = make_tagger();
    CHECK(place_ids(tagger.tag(doc_by_id("en-003"))) == std::vector<std::string>{"FR-PAR"});
    // "Javier" without "Solana" in the same text is a legitimate place
    CHECK(place_ids(tagger.tag(doc_by_id("es-001"))) == std::vector<std::string>{"ES-JAV"});
}

TEST_CASE("stop words fall out, sentence-initial homographs included") {
    const auto tagger = make_tagger();
    CHECK(place_ids(tagger.tag(doc_by_id("en-004"))) == std::vector<std::string>{"FR-PAR"});
    CHECK(place_ids(tagger.tag(doc_by_id("de-001"))) == std::vector<std::string>{"DE-MUC"});
    CHECK(place_ids(tagger.tag(doc_by_id("fr-002"))) == std::vector<std::string>{"FR-BRE", "FR-REN"});
}

TEST_CASE("publishing-place metadata steers homographs") {
    const auto tagger = make_tagger();
    const TaggedRecord tagged = tagger.tag(doc_by_id("en-005"));
    REQUIRE(tagged.mentions.size() == 1);
    CHECK(tagged.mentions[0].place_id == "US-TX-PAR");
    CHECK(tagged.mentions[0].score == Catch::Approx(120.0));
    // without the geo-context heuristic the capital wins again
    TaggerConfig config;
    disable_heuristic(config.toggles, "geo-context");
    CHECK(place_ids(make_tagger(config).tag(doc_by_id("en-005"))) ==
          std::vector<std::string>{"FR-PAR"});
}

TEST_CASE("shallow context plus distance resolves san antonio") {
    const auto tagger = make_tagger();
    CHECK(place_ids(tagger.tag(doc_by_id("en-006"))) ==
          std::vector<std::string>{"PH-SAT", "PH-MNL"});
}

TEST_CASE("morphology documents resolve to paris") {
    const auto tagger = make_tagger();
    const TaggedRecord ro = tagger.tag(doc_by_id("ro-001"));
    REQUIRE(ro.mentions.size() == 2);
    CHECK(ro.mentions[0].surface == "Parisului");
    CHECK(ro.mentions[0].place_id == "FR-PAR");
    const TaggedRecord fr = tagger.tag(doc_by_id("fr-001"));
    REQUIRE(fr.mentions.size() == 2);
    CHECK(fr.mentions[0].surface == "Parisiens");
    CHECK(fr.mentions[0].place_id == "FR-PAR");
    const TaggedRecord ar = tagger.tag(doc_by_id("ar-002"));
    REQUIRE(ar.mentions.size() == 1);
    CHECK(ar.mentions[0].surface == "الباريسيون");
    CHECK(ar.mentions[0].place_id == "FR-PAR");
}

TEST_CASE("french elision resolves the country name") {
    const auto tagger = make_tagger();
    const TaggedRecord tagged = tagger.tag(doc_by_id("fr-003"));
    REQUIRE(tagged.mentions.size() == 2);
    CHECK(tagged.mentions[0].surface == "L'Italie");
    CHECK(tagged.mentions[0].place_id == "IT");
    CHECK(tagged.mentions[1].place_id == "IT-VEN");
}

TEST_CASE("italian monaco goes to munich inside a german context") {
    const auto tagger = make_tagger();
    const TaggedRecord tagged = tagger.tag(doc_by_id("it-001"));
    REQUIRE(tagged.mentions.size() == 2);
    CHECK(tagged.mentions[0].surface == "Monaco");
    CHECK(tagged.mentions[0].place_id == "DE-MUC");
    CHECK(tagged.mentions[0].method == "deep");  // ambiguous, so not shallow
}

TEST_CASE("strict mode drops small places outside the context") {
    DocumentRecord doc;
    doc.id = "strict-1";
    doc.lang = "en";
    doc.text = "They met in Springfield.";
    doc.source_country = "GB";
    TaggerConfig config;
    config.mode = ResolveMode::strict;
    const TaggedRecord strict = make_tagger(config).tag(doc);
    CHECK(strict.mentions.empty());
    const TaggedRecord scored = make_tagger().tag(doc);
    CHECK(scored.mentions.size() == 1);
}

TEST_CASE("malformed source_country is reported, not fatal") {
    DocumentRecord doc;
    doc.id = "warn-1";
    doc.lang = "en";
    doc.text = "Warsaw woke up.";
    doc.source_country = "Poland";  // not an ISO code
    const auto resolution = make_tagger().resolve_document(doc);
    REQUIRE(resolution.warnings.size() == 1);
    CHECK(resolution.resolved.size() == 1);
    CHECK(resolution.context.countries.count("PL") == 1);  // from the shallow pass
}

TEST_CASE("tagging the fixture corpus reproduces every gold annotation") {
    const Fixture& f = fixture();
    const auto tagged = make_tagger().tag_all(f.docs);
    const auto report = make_report(f.gold, predictions_from(tagged), MatchMode::place, "all");
    CHECK(report.overall.scores.precision == 1.0);
    CHECK(report.overall.scores.recall == 1.0);
    CHECK(report.overall.scores.f_measure == 1.0);
    // seven languages in the fixture corpus
    CHECK(report.per_language.size() == 7);
}

TEST_CASE("the no-heuristics baseline is strictly worse") {
    const Fixture& f = fixture();
    TaggerConfig config;
    config.toggles = {false, false, false, false, false};
    const auto tagged = make_tagger(config).tag_all(f.docs);
    const auto report = make_report(f.gold, predictions_from(tagged), MatchMode::place, "none");
    CHECK(report.overall.scores.f_measure < 1.0);
    CHECK(report.overall.scores.precision < 1.0);
}

TEST_CASE("tagging is deterministic") {
    const Fixture& f = fixture();
    const auto tagger = make_tagger();
    std::ostringstream first, second;
    for (const auto& record : tagger.tag_all(f.docs)) first << to_json(record).dump() << "\n";
    for (const auto& record : tagger.tag_all(f.docs)) second << to_json(record).dump() << "\n";
    CHECK(first.str() == second.str());
}

TEST_CASE("document records parse and validate") {
    const DocumentRecord doc =
        parse_document(R"({"id":"d1","lang":"en","text":"Hi","article_count":3})", 1);
    CHECK(doc.id == "d1");
    CHECK(doc.article_count == 3);
    CHECK_THROWS_AS(parse_document(R"({"lang":"en","text":"Hi"})", 4), SchemaError);
    CHECK_THROWS_WITH(parse_document("not json", 7), Catch::Matchers::ContainsSubstring(":7"));
    CHECK_THROWS_AS(parse_document(R"({"id":"d","lang":"en","text":"x","article_count":0})", 1),
                    SchemaError);
}

TEST_CASE("tagged records round-trip through jsonl") {
    const auto tagger = make_tagger();
    const TaggedRecord tagged = tagger.tag(doc_by_id("en-001"));
    const std::string line = to_json(tagged).dump();
    const TaggedRecord back = parse_tagged(line, 1);
    CHECK(back.doc.id == tagged.doc.id);
    REQUIRE(back.mentions.size() == tagged.mentions.size());
    for (std::size_t i = 0; i < back.mentions.size(); ++i) {
        CHECK(back.mentions[i].place_id == tagged.mentions[i].place_id);
        CHECK(back.mentions[i].start == tagged.mentions[i].start);
        CHECK(back.mentions[i].score == tagged.mentions[i].score);
    }
}

TEST_CASE("gold loader validates spans") {
    namespace fs = std::filesystem;
    const auto path = fs::temp_directory_path() / "geoparse_gold_bad.jsonl";
    std::ofstream(path, std::ios::trunc)
        << R"({"doc_id":"d","start":5,"end":5,"place_id":"X"})" << "\n";
    CHECK_THROWS_AS(load_gold(path.string()), SchemaError);
}
