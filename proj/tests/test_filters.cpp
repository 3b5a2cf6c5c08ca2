#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>
#include <random>

#include "geoparse/filters.hpp"

using namespace geoparse;
namespace fs = std::filesystem;

namespace {

GazetteerIndex stop_index() {
    std::vector<PlaceEntry> places = {
        {"IR-AND", "And", "IR", 38.0, 48.4, 6, "gd"},
        {"GH-TO", "To", "GH", 10.0, -2.0, 6, "gd"},
        {"IN-BE", "Be", "IN", 21.0, 82.0, 6, "gd"},
        {"ES-JAV", "Javier", "ES", 42.59, -1.21, 5, "gd"},
        {"PH-SOL", "Solana", "PH", 17.65, 121.69, 4, "gd"},
        {"US-LA-BUSH", "Bush", "US", 30.59, -89.99, 5, "gd"},
        {"FR-PAR", "Paris", "FR", 48.8566, 2.3522, 1, "gd"},
        {"FR-DIE", "Die", "FR", 44.75, 5.37, 5, "gd"},
    };
    return GazetteerIndex::build(std::move(places), {});
}

std::vector<CandidateMention> scan_en(const GazetteerIndex& index, const std::string& doc) {
    return scan(doc, "en", index, {});
}

fs::path write_corpus(const std::string& name, const std::vector<std::pair<std::string, int>>& words,
                      int total_tokens) {
    int used = 0;
    std::string corpus;
    for (const auto& [word, count] : words) {
        for (int i = 0; i < count; ++i) corpus += word + " ";
        used += count;
    }
    for (int i = used; i < total_tokens; ++i) corpus += "xx ";
    const fs::path path = fs::temp_directory_path() / ("geoparse_corpus_" + name + ".txt");
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << corpus;
    return path;
}

}  // namespace

TEST_CASE("match_persons finds exact token sequences") {
    PersonLexicon lexicon;
    lexicon.add("Javier Solana");
    const std::string doc = "EU-general secretary Javier Solana said so.";
    const auto matches = match_persons(doc, tokenize(doc, "en"), lexicon);
    REQUIRE(matches.spans.size() == 1);
    CHECK(doc.substr(matches.spans[0].start, matches.spans[0].end - matches.spans[0].start) ==
          "Javier Solana");
    CHECK(matches.name_parts == std::set<std::string>{"Javier", "Solana"});
}

TEST_CASE("partial person names do not match") {
    PersonLexicon lexicon;
    lexicon.add("Kofi Annan");
    const std::string doc = "The Annan airport reopened.";
    const auto matches = match_persons(doc, tokenize(doc, "en"), lexicon);
    CHECK(matches.spans.empty());
    CHECK(matches.name_parts.empty());
}

TEST_CASE("empty lexicon matches nothing") {
    const std::string doc = "Javier Solana spoke.";
    const auto matches = match_persons(doc, tokenize(doc, "en"), PersonLexicon{});
    CHECK(matches.spans.empty());
    CHECK(matches.name_parts.empty());
}

TEST_CASE("filter_persons drops person-name collisions") {
    const auto index = stop_index();
    PersonLexicon lexicon;
    lexicon.add("Javier Solana");
    const std::string doc = "EU-general secretary Javier Solana visited Paris.";
    const auto mentions = scan_en(index, doc);
    REQUIRE(mentions.size() == 3);  // Javier, Solana, Paris
    const auto kept = filter_persons(mentions, match_persons(doc, tokenize(doc, "en"), lexicon));
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].surface == "Paris");
}

TEST_CASE("name parts drop standalone mentions elsewhere in the document") {
    const auto index = stop_index();
    PersonLexicon lexicon;
    lexicon.add("George Bush");
    const std::string doc = "George Bush spoke. Bush praised the plan near Paris.";
    const auto mentions = scan_en(index, doc);
    const auto kept = filter_persons(mentions, match_persons(doc, tokenize(doc, "en"), lexicon));
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].surface == "Paris");
}

TEST_CASE("name-part comparison is case sensitive") {
    PersonMatches matches;
    matches.name_parts.insert("Bush");
    std::vector<CandidateMention> mentions(1);
    mentions[0].start = 0;
    mentions[0].end = 4;
    mentions[0].surface = "BUSH";
    const PlaceEntry dummy{"X", "X", "US", 0, 0, 5, "t"};
    mentions[0].candidates = {&dummy};
    CHECK(filter_persons(mentions, matches).size() == 1);
    mentions[0].surface = "Bush";
    CHECK(filter_persons(mentions, matches).empty());
}

TEST_CASE("filter_stopwords is language scoped") {
    const auto index = stop_index();
    StopList list;
    list.add({"and", "en", "corpus"});
    list.add({"die", "de", "corpus"});

    auto mentions = scan_en(index, "And the rain fell on Paris.");
    REQUIRE(mentions.size() == 2);
    auto kept = filter_stopwords(mentions, list, "en");
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].surface == "Paris");

    // German mention "Die" dropped under (die, de)
    auto de_mentions = scan("Die Stadt wartet.", "de", index, {});
    REQUIRE(de_mentions.size() == 1);
    CHECK(filter_stopwords(de_mentions, list, "de").empty());
    // with only (die, fr) in the list the German mention survives
    StopList fr_only;
    fr_only.add({"die", "fr", "corpus"});
    CHECK(filter_stopwords(de_mentions, fr_only, "de").size() == 1);
}

TEST_CASE("wildcard stop entries apply to every language") {
    StopList list;
    list.add({"paris", "*", "manual"});
    const auto index = stop_index();
    const auto mentions = scan_en(index, "Paris sleeps.");
    REQUIRE(mentions.size() == 1);
    CHECK(filter_stopwords(mentions, list, "en").empty());
    CHECK(filter_stopwords(mentions, list, "ro").empty());
}

TEST_CASE("filters are idempotent, commute, and only remove", "[property]") {
    const auto index = stop_index();
    StopList list;
    list.add({"and", "en", "corpus"});
    list.add({"to", "en", "corpus"});
    PersonLexicon lexicon;
    lexicon.add("Javier Solana");
    lexicon.add("George Bush");

    std::mt19937 rng(99);
    const std::string words[] = {"Javier", "Solana", "George", "Bush", "Paris", "And", "To", "Be", "rain"};
    for (int trial = 0; trial < 200; ++trial) {
        std::string doc;
        const int len = 1 + static_cast<int>(rng() % 12);
        for (int i = 0; i < len; ++i) doc += words[rng() % std::size(words)] + " ";
        const auto mentions = scan_en(index, doc);
        const auto persons = match_persons(doc, tokenize(doc, "en"), lexicon);

        const auto p1 = filter_persons(mentions, persons);
        const auto p2 = filter_persons(p1, persons);
        REQUIRE(p1.size() == p2.size());  // idempotent

        const auto s1 = filter_stopwords(mentions, list, "en");
        const auto s2 = filter_stopwords(s1, list, "en");
        REQUIRE(s1.size() == s2.size());

        // commute
        const auto ps = filter_stopwords(p1, list, "en");
        const auto sp = filter_persons(s1, persons);
        REQUIRE(ps.size() == sp.size());
        for (std::size_t i = 0; i < ps.size(); ++i) CHECK(ps[i].start == sp[i].start);

        // output is a subset of input
        CHECK(ps.size() <= mentions.size());
        std::size_t cursor = 0;
        for (const auto& kept : ps) {
            bool found = false;
            for (; cursor < mentions.size(); ++cursor)
                if (mentions[cursor].start == kept.start && mentions[cursor].end == kept.end) {
                    found = true;
                    break;
                }
            CHECK(found);
        }
    }
}

TEST_CASE("corpus builder proposes frequent lowercase gazetteer names") {
    const auto index = stop_index();
    // 200000 tokens total; threshold 10/M means the cutoff sits at count 2
    const auto path = write_corpus("main", {{"and", 1000}, {"to", 2}, {"be", 1}}, 200000);
    const auto proposals = build_stoplist_from_corpus(path.string(), index, 10.0);
    REQUIRE(proposals.size() == 2);
    CHECK(proposals[0].name == "and");
    CHECK(proposals[0].frequency_per_million == Catch::Approx(5000.0));
    CHECK(proposals[0].source == "corpus");
    CHECK_FALSE(proposals[0].accepted);
    CHECK(proposals[1].name == "to");  // exactly at the threshold: >= passes
    CHECK(proposals[1].frequency_per_million == Catch::Approx(10.0));
}

TEST_CASE("corpus builder ignores capitalized occurrences") {
    const auto index = stop_index();
    const auto path = write_corpus("upper", {{"And", 500}}, 1000);
    CHECK(build_stoplist_from_corpus(path.string(), index, 1.0).empty());
}

TEST_CASE("corpus builder rejects empty corpora and bad thresholds") {
    const auto index = stop_index();
    const fs::path empty = fs::temp_directory_path() / "geoparse_corpus_empty.txt";
    std::ofstream(empty, std::ios::trunc) << "  \n\t ";
    CHECK_THROWS_AS(build_stoplist_from_corpus(empty.string(), index, 5.0), FilterError);
    const auto path = write_corpus("thr", {{"and", 10}}, 100);
    CHECK_THROWS_AS(build_stoplist_from_corpus(path.string(), index, 0.0), FilterError);
}

TEST_CASE("firstname builder proposes gazetteer homographs") {
    const auto index = stop_index();
    const auto proposals = build_stoplist_from_firstnames({"Javier", "Maria"}, index);
    REQUIRE(proposals.size() == 1);
    CHECK(proposals[0].name == "javier");
    CHECK(proposals[0].source == "firstname");
    CHECK(build_stoplist_from_firstnames({}, index).empty());
    CHECK(build_stoplist_from_firstnames({"Xqzw"}, index).empty());
}

TEST_CASE("unaccepted proposals never reach the stop list") {
    const auto index = stop_index();
    auto proposals = build_stoplist_from_firstnames({"Javier"}, index);
    REQUIRE(proposals.size() == 1);
    CHECK(to_stoplist(proposals).size() == 0);
    const auto mentions = scan_en(index, "Javier waited.");
    CHECK(filter_stopwords(mentions, to_stoplist(proposals), "en").size() == 1);
    proposals[0].accepted = true;
    CHECK(to_stoplist(proposals).size() == 1);
    CHECK(filter_stopwords(mentions, to_stoplist(proposals), "en").empty());
}

TEST_CASE("stoplist file loader") {
    const fs::path path = fs::temp_directory_path() / "geoparse_stoplist.tsv";
    std::ofstream(path, std::ios::trunc) << "# comment\nand\ten\tcorpus\nDie\tde\tmanual\n";
    const StopList list = StopList::load(path.string());
    CHECK(list.size() == 2);
    CHECK(list.contains("and", "en"));
    CHECK(list.contains("die", "de"));  // names are normalized on load
    CHECK_FALSE(list.contains("and", "de"));
    std::ofstream(path, std::ios::trunc) << "broken line without tabs\n";
    CHECK_THROWS_AS(StopList::load(path.string()), FilterError);
}
